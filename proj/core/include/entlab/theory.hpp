#pragma once

// Closed-form predictions for the complexity-parameter dependence of the
// entanglement measures: limiting (ergodic) entropies, the relaxation of R0
// and Q, the bracket law for R1/R2, and the exponential size model for the
// rescaling constants D_n.

#include "entlab/errors.hpp"

namespace entlab {

/// Size model D_n(l_a) = a * 2^(b * l_a) for the entropy-index-specific
/// rescaling constant.
struct d_model {
  double a = 1.0;
  double b = 0.0;
};

double d_of_size(const d_model& m, int l_a);

/// Parameters of the theory curves.  tau = 0 means "use the default 1/D_n";
/// q2_estimate = 0 means "use the separable-limit bound N^2";
/// r0_infinity = 0 means "use the amplitude-consistent formula
/// N * (r_infinity(1) + q0)", i.e. the value that makes the n = 1 bracket law
/// saturate exactly at the ergodic von Neumann entropy.
struct theory_params {
  double beta = 2.0;
  double gamma = 1.0;
  int n_a = 2;
  int n_b = 2;
  double tau = 0.0;
  d_model d1;
  d_model d2;
  double r0_infinity = 0.0;
  double q2_estimate = 0.0;
  bool eq16_variant = false;  // bracket exponent -tau (beta Lambda / 2 - 1)
};

/// Ergodic-limit entropies.  n = 1: log N - N / (2 (N + nu0));
/// n = 2: log(N (N + nu0) / (2 N + nu0 - 1)); N = n_a, nu0 = n_b - n_a.
double r_infinity(int n, int n_a, int n_b);

/// Drift constant q0 = (2 N + nu0 - 1) / (N + nu0).
double q0_factor(int n_a, int n_b);

/// Spectral rigidity factors chi_1 = (N + 2 nu D - 1)/(N + 2 nu - 1),
/// chi_2 = (N + nu D - 1)/(N + 2 nu - 1), with nu = (n_b - n_a + 1)/2.
double chi_factor(int n, int n_a, int n_b, double d);

/// R0 relaxation: r0_infinity + N^2 / (2 gamma tau (Lambda - 1)), Lambda > 1.
double r0_of_lambda(double lambda, const theory_params& p);

/// Participation-ratio relaxation:
/// exp(tau (1 - beta Lambda / 2)) + (beta / 2N) q2 (1 - exp(...)).
double q_of_lambda(double lambda, const theory_params& p);

/// Bracket law for R_n, n in {1, 2}:
///   ((-1)^(n-1) / n) * g_n * (1 - L_A^(-beta Lambda / (2 D_n)))
/// with L_A = log2 n_a, g_1 = g_input / N - q0 (g_input is an R0 value) and
/// g_2 = -(2 beta / N) * g_input (g_input is a <1/S2> value).  The caller
/// chooses the g input: a Monte Carlo measurement, r0_of_lambda /
/// q_of_lambda, or the calibrated infinite-Lambda constants.
double r_n_of_lambda(int n, double lambda, const theory_params& p,
                     double g_input);

}  // namespace entlab
