#pragma once

// Schmidt spectrum and bipartite entanglement measures of a state matrix.
//
// The Schmidt eigenvalues are the squared singular values of C, renormalized
// to sum to one.  Entropies use natural logarithms throughout the library;
// base conversion happens only at the output layer.

#include <cstdint>
#include <span>
#include <vector>

#include "entlab/sampler.hpp"

namespace entlab {

/// Values below this are floored inside R0's log sum; the flooring count is
/// surfaced so consumers can tell how many Schmidt values were effectively
/// zero at working precision.
inline constexpr double k_r0_floor = 1e-300;

/// Descending, unit-sum Schmidt eigenvalues.
struct spectrum {
  std::vector<double> lambda;
};

/// Singular values only, via LAPACK's divide-and-conquer SVD of C itself
/// (never forming C C^dagger, which would square the condition number).
/// Throws numerical_error with a size/norm report if the SVD fails.
spectrum schmidt_spectrum(const state_matrix& m);

/// Entanglement measures of one spectrum.
struct entropy_record {
  double r0 = 0;  // -sum log lambda, floored at k_r0_floor
  double r1 = 0;  // -sum lambda log lambda (von Neumann)
  double r2 = 0;  // -log sum lambda^2 (second Renyi)
  double q = 0;   // 1 / sum lambda^2 (participation ratio)
  double s2 = 0;  // sum lambda^2
  int floored = 0;
};

entropy_record entropies(const spectrum& s);

/// Mean and standard error of each measure over a set of records.
struct point_stats {
  double r0_mean = 0, r0_err = 0;
  double r1_mean = 0, r1_err = 0;
  double r2_mean = 0, r2_err = 0;
  double q_mean = 0, q_err = 0;
  double q2_mean = 0;  // mean of q^2, used by theory calibration
  long long n = 0;
  long long floored_total = 0;
};

point_stats aggregate(std::span<const entropy_record> records);

}  // namespace entlab
