#pragma once

// Experiment drivers: Monte Carlo measurement of grid points, the
// universality sweep with its two-stage grid and rescaling-constant fits,
// size scaling of the rescaling constants, finite-size criticality (crossing
// and data collapse), and the subsystem-size (cut) scan.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "entlab/ensembles.hpp"
#include "entlab/fitcore.hpp"
#include "entlab/measures.hpp"

// Grid-point failure policy: with a non-null `warnings` sink, a grid point
// that cannot be solved or measured is skipped and described in the sink;
// without one the underlying exception propagates.  FSS drops the whole
// alpha column so the size curves stay rectangular.

namespace entlab {

/// One measured grid point, ready for serialization.
struct sweep_point {
  family fam = family::BE;
  int l_a = 0;
  int l_b = 0;
  double gamma = 0;
  double param = 0;       // mu, or the SE width w after ray scaling
  double lambda = 0;      // closed-form value at the solved parameters
  double lambda_ent = 0;  // lambda / D_1, attached after fitting
  point_stats stats;
  std::uint64_t seed = 0;  // stream key used for this point's samples
};

/// Draws `samples` states from the profile and measures each; record i is
/// sample i regardless of worker count.
std::vector<entropy_record> measure_records(const profile& p,
                                            long long samples,
                                            std::uint64_t seed, int workers);

/// measure_records + aggregate.
point_stats measure_point(const profile& p, long long samples,
                          std::uint64_t seed, int workers);

/// Ergodic-limit (h = 1) calibration run.  r0_infinity is the
/// amplitude-consistent constant N (r1_mean + q0): with it the n = 1 bracket
/// law saturates exactly at the measured ergodic von Neumann entropy.
/// Results are cached per (n_a, n_b, samples, seed) for the process lifetime.
struct ergodic_moments {
  int n_a = 0, n_b = 0;
  point_stats stats;
  double r0_infinity = 0;
};
ergodic_moments ergodic_calibration(int n_a, int n_b, long long samples,
                                    std::uint64_t seed, int workers);

// ---------------------------------------------------------------- sweeps --

struct sweep_config {
  std::vector<family> families{family::BE};
  int l_a = 8;
  int l_b = 8;
  double gamma = 0.5;
  long long samples = 150;
  long long probe_samples = 48;
  std::uint64_t seed = 1;
  int workers = 0;
  int se_hamming_radius = 3;
  double se_ray = 1.0;  // w_s / w search-ray ratio for SE
  bool ee_squared = false;
  std::vector<double> lambda_grid;  // explicit grid; empty = two-stage auto
  double ent_lo = 0.01;  // rescaled coverage target of the auto grid
  double ent_hi = 100.0;
};

/// Template spec for a family under a sweep config (parameters left at 1).
ensemble_spec base_spec(const sweep_config& cfg, family f);

struct bracket_fit {
  double amplitude = 0;
  double d = 0;
  double r_squared = 0;
};

/// Fits y(Lambda) = amplitude * (1 - L_A^(-Lambda/D)) by weighted least
/// squares (beta = 2 folded into the exponent).
bracket_fit fit_bracket(std::span<const double> lambda,
                        std::span<const double> y,
                        std::span<const double> err, double l_a);

struct family_sweep {
  ensemble_spec base;
  std::vector<sweep_point> points;
  double d1_rough = 0, d2_rough = 0;  // probe-stage estimates
  bracket_fit fit1, fit2;             // final-grid fits for n = 1, 2
};

struct pair_deviation {
  family f1 = family::BE, f2 = family::BE;
  double max_dev_r1 = 0;  // max |curve difference| on the common
  double max_dev_r2 = 0;  // rescaled grid, per entropy index
};

struct universality_result {
  std::vector<family_sweep> families;
  std::vector<pair_deviation> deviations;
  bool covered = false;  // every family spans [ent_lo, ent_hi] for n = 1, 2
};

universality_result universality_sweep(const sweep_config& cfg,
                                       std::vector<std::string>* warnings = nullptr);

// ------------------------------------------------------- size scaling ----

struct dscaling_config {
  family fam = family::BE;
  int l_a_min = 4;
  int l_a_max = 9;  // balanced cuts, l_b = l_a
  double gamma = 0.5;
  long long samples = 200;
  std::uint64_t seed = 1;
  int workers = 0;
  int se_hamming_radius = 3;
  double se_ray = 1.0;
  bool ee_squared = false;
};

struct dscaling_result {
  family fam = family::BE;
  std::vector<int> l_a;
  std::vector<double> d1, d2;
  exp_fit fit1, fit2;  // D_n = a * 2^(b l_a)
  std::vector<family_sweep> sweeps;
};

dscaling_result extract_d(const dscaling_config& cfg,
                          std::vector<std::string>* warnings = nullptr);

// ---------------------------------------------------------- criticality --

struct fss_config {
  family fam = family::BE;
  double c = 0.1;  // BE: mu = (1/c) N_A^alpha; PE/EE: mu = c N_A^(2-alpha)
  std::vector<int> l_total{12, 14, 16, 18};  // balanced, l_a = l_total/2
  double alpha_lo = 0.95;
  double alpha_hi = 1.75;
  double alpha_step = 0.05;
  long long samples = 300;
  double gamma = 1.0;
  std::uint64_t seed = 1;
  int workers = 0;
  int bootstrap = 200;
};

struct alpha_curves {
  fss_config cfg;
  std::vector<double> alpha;
  std::vector<int> l_total;
  // Outer index: size; inner: alpha grid.
  std::vector<std::vector<double>> r1_mean, r1_err, mu, lambda, lambda_asym;
  std::vector<std::vector<point_stats>> stats;  // full moments, same layout
  std::vector<std::vector<std::uint64_t>> seed;
  // Per-sample von Neumann entropies for bootstrap resampling.
  std::vector<std::vector<std::vector<double>>> r1_samples;
};

alpha_curves alpha_sweep(const fss_config& cfg,
                         std::vector<std::string>* warnings = nullptr);

struct pair_crossing {
  int l_i = 0, l_j = 0;
  double alpha_x = 0, r_x = 0;
};

struct crossing_result {
  std::vector<pair_crossing> pairs;
  double alpha_star = 0, r_star = 0;  // medians over pairs
  double alpha_spread = 0, r_spread = 0;
};

/// Pairwise crossings of the size curves by linear interpolation of their
/// differences; medians and spreads over all size pairs.
crossing_result find_crossing(const alpha_curves& curves);

struct collapse_result {
  double alpha_star = 0;
  double nu = 0;
  double cost = 0;
  double r_star = 0;          // master curve value at zero scaling argument
  double cost_ratio_min = 0;  // min over the fixed perturbation probes
  crossing_result crossing;
  // Bootstrap percentile bands (2.5%, 97.5%).
  double alpha_band_lo = 0, alpha_band_hi = 0;
  double nu_band_lo = 0, nu_band_hi = 0;
  double r_cross_band_lo = 0, r_cross_band_hi = 0;
  int bootstrap = 0;
};

/// Collapse cost: normalized residual variance of all points around a
/// windowed local-linear master curve in x = (alpha - alpha*) L^(1/nu).
double collapse_cost(const alpha_curves& curves, double alpha_star, double nu);

/// Minimizes the collapse cost, runs the perturbation probes, and bootstraps
/// sample-level resamples for parameter bands.
collapse_result collapse(const alpha_curves& curves);

// ------------------------------------------------------------- cut scan --

struct cutscan_config {
  std::vector<family> families{family::BE};
  int l_total = 20;
  std::vector<double> lambda_targets{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  long long samples = 48;
  double gamma = 0.5;
  std::uint64_t seed = 1;
  int workers = 0;
  int se_hamming_radius = 3;
  double se_ray = 1.0;
  bool ee_squared = false;
};

struct cutscan_result {
  cutscan_config cfg;
  // points[family][target][cut], cut index 0 is l_a = 1.
  std::vector<std::vector<std::vector<sweep_point>>> points;
  // Entropy-maximizing subsystem size per (family, target).
  std::vector<std::vector<int>> l_m;
};

cutscan_result cut_scan(const cutscan_config& cfg,
                        std::vector<std::string>* warnings = nullptr);

}  // namespace entlab
