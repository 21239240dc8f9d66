#pragma once

// Variance-profile ensembles of bipartite Gaussian state matrices and their
// complexity parameter.
//
// A state matrix C is n_a x n_b complex with independent zero-mean Gaussian
// entries; h(k, l) is the common variance of the real and imaginary parts of
// entry (k, l).  Matrix indices in the defining formulas are 1-based (k = 1..
// n_a, l = 1..n_b); storage is row-major 0-based.
//
// Four families are supported, each interpolating between a separable
// reference profile (h = 1 on parameter-independent cells, 0 elsewhere) and
// an ergodic limit:
//   BE: h(k,1) = 1, h(k,l) = 1/(1+mu) for l > 1
//   PE: h(k,l) = 1/(1 + k(l-1)/mu)
//   EE: h(k,l) = exp(-k(l-1)/mu), or exp(-(k(l-1)/mu)^2) with ee_squared
//   SE: h(k,l) = exp(-k(l-1)/w^2) on the diagonal (d = 0),
//       exp(-k(l-1)/w_s^2) for 0 < d <= hamming_radius, 0 otherwise,
//       where d is the Hamming distance between the zero-based labels.
//
// The ensemble complexity parameter Lambda measures the distance of a profile
// from its separable reference:
//   Lambda = -(1/(2 gamma)) * sum over evolved cells of
//            [ ln|1 - 2 gamma h| - ln|1 - 2 gamma h_ref| ]
// Cells whose variance never leaves its reference value carry no evolution
// and are excluded from all sums; cells at the equilibrium variance 1/gamma
// are excluded by the generalized sum rule (they are stationary under the
// underlying diffusion).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "entlab/errors.hpp"

namespace entlab {

enum class family : int { BE = 0, PE = 1, EE = 2, SE = 3 };

std::string_view family_name(family f);
family family_from_name(std::string_view name);

/// Full parameter set identifying one ensemble member distribution.
struct ensemble_spec {
  family fam = family::BE;
  int l_a = 1;              // subsystem qubits, n_a = 2^l_a
  int l_b = 1;              // environment qubits, n_b = 2^l_b
  double gamma = 1.0;       // confinement strength of the ensemble density
  double mu = 1.0;          // BE/PE/EE evolution parameter
  double w = 1.0;           // SE diagonal width
  double w_s = 1.0;         // SE off-diagonal width
  int hamming_radius = 0;   // SE band radius; cells beyond it are zero
  bool ee_squared = false;  // EE variant with squared exponent argument

  int n_a() const { return 1 << l_a; }
  int n_b() const { return 1 << l_b; }
  long long n_cells() const {
    return static_cast<long long>(n_a()) * n_b();
  }
};

/// Per-entry variance matrix, row-major n_a x n_b.
struct profile {
  int n_a = 0;
  int n_b = 0;
  std::vector<double> h;

  double at(int k, int l) const {  // 1-based accessors matching the formulas
    return h[static_cast<std::size_t>(k - 1) * n_b + (l - 1)];
  }
  double& at(int k, int l) {
    return h[static_cast<std::size_t>(k - 1) * n_b + (l - 1)];
  }
};

/// Hamming distance between the zero-based binary labels of 1-based indices.
int hamming_distance(long long k, long long l);

/// Evaluates the family's variance profile at the spec's parameters.
profile variance_profile(const ensemble_spec& spec);

/// Separable reference profile: 1 on parameter-independent cells, 0 elsewhere.
profile initial_profile(const ensemble_spec& spec);

/// Maximum-entanglement profile, h = 1 everywhere (stationary Wishart limit).
profile ergodic_profile(int n_a, int n_b);

/// Complexity parameter by the per-family closed-form sum.  Log arguments are
/// evaluated in numerically stable form, so extreme near-ergodic parameters
/// remain usable at gamma <= 1/2 where the sums are unbounded.
/// Throws singular_term_error if an evolved term sits on a log singularity
/// (possible only for gamma > 1/2, where 1 - 2 gamma h crosses zero at finite
/// parameter values).
double lambda_closed_form(const ensemble_spec& spec);

/// Complexity parameter by the generic ensemble-average route: the log-sum
/// functional of the profile minus that of the separable reference, cell by
/// cell.  Literal transcription working from the stored profile values; its
/// domain ends where a profile entry rounds to the singular variance.
double lambda_generic(const ensemble_spec& spec);

/// Monotone-branch parameter bounds for the spec's family and gamma.
/// For SE the parameter is a common scale factor applied to (w, w_s).
struct param_bounds {
  double lo = 0;
  double hi = 0;
};
param_bounds parameter_bounds(const ensemble_spec& spec);

/// True if Lambda increases with the search parameter (PE/EE/SE); BE's
/// Lambda decreases with mu.
bool lambda_increasing(family f);

/// Attainable Lambda range over the monotone branch, ordered low to high.
param_bounds lambda_range(const ensemble_spec& spec);

/// Inverts Lambda(parameter) by bracketing bisection on the monotone branch:
/// returns the parameter value (mu, or the SE ray scale applied to both
/// widths) with |Lambda(p) - target| / target <= 1e-8.
/// Throws domain_error if the target is outside the attainable range.
double mu_for_lambda(const ensemble_spec& spec, double lambda_target);

/// Convenience: copy of `spec` with its parameters set so the closed-form
/// Lambda equals `lambda_target` (same tolerance as mu_for_lambda).
ensemble_spec spec_for_lambda(const ensemble_spec& spec, double lambda_target);

}  // namespace entlab
