#pragma once

// CSV serialization with locale-free, round-trip-exact numeric formatting
// (shortest form that restores the same bits, '.' decimal).  Entropy columns
// honor the run-level log base; derived quantities are always written in
// natural logs.

#include <ostream>
#include <span>
#include <string>

#include "entlab/experiments.hpp"

namespace entlab {

std::string format_double(double v);

inline constexpr const char* points_csv_header =
    "family,l_a,l_b,gamma,param,lambda,lambda_ent,r0_mean,r0_err,r1_mean,"
    "r1_err,r2_mean,r2_err,q_mean,q_err,n_samples,seed";

/// Header plus one row per point.  log_base 2 divides the entropy columns
/// (r0/r1/r2 means and errors) by log 2; everything else is unchanged.
void write_points_csv(std::ostream& out, std::span<const sweep_point> points,
                      int log_base);

struct derived_row {
  std::string record;  // producing analysis, e.g. "bracket_fit"
  std::string family;  // family name, pair label, or "" when not applicable
  int l_a = 0;
  int l_b = 0;
  std::string name;
  double value = 0;
};

inline constexpr const char* derived_csv_header =
    "record,family,l_a,l_b,name,value";

void write_derived_csv(std::ostream& out, std::span<const derived_row> rows);

struct theory_row {
  double lambda = 0, lambda_ent = 0;
  double r1_pred = 0, r2_pred = 0, r0_pred = 0, q_pred = 0;
};

inline constexpr const char* theory_csv_header =
    "lambda,lambda_ent,r1_pred,r2_pred,r0_pred,q_pred";

/// Prediction-curve rows; log_base 2 converts the three entropy predictions.
void write_theory_csv(std::ostream& out, std::span<const theory_row> rows,
                      int log_base);

}  // namespace entlab
