#include "entlab/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

namespace entlab {
namespace {

constexpr double k_equilibrium_tol = 1e-14;  // |1 - gamma h| below this: skip
constexpr double k_singular_tol = 1e-14;     // |1 - 2 gamma h| below this: error

// Compensated accumulator; the closed-form sums run over up to 2^20 terms of
// mixed magnitude and the generic/closed agreement budget is 1e-10 relative.
struct kahan_sum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

void check_spec(const ensemble_spec& spec) {
  if (spec.l_a < 1 || spec.l_a > 30 || spec.l_b < 1 || spec.l_b > 30)
    throw domain_error("ensemble_spec: l_a and l_b must be in [1, 30]");
  if (!(spec.gamma > 0.0))
    throw domain_error("ensemble_spec: gamma must be positive");
  switch (spec.fam) {
    case family::BE:
    case family::PE:
    case family::EE:
      if (!(spec.mu > 0.0) || !std::isfinite(spec.mu))
        throw domain_error("ensemble_spec: mu must be positive and finite");
      break;
    case family::SE:
      if (!(spec.w > 0.0) || !(spec.w_s > 0.0) || !std::isfinite(spec.w) ||
          !std::isfinite(spec.w_s))
        throw domain_error("ensemble_spec: w and w_s must be positive and finite");
      if (spec.hamming_radius < 0)
        throw domain_error("ensemble_spec: hamming_radius must be >= 0");
      break;
  }
}

// Stable log argument 1 - 2 gamma h for h = exp(-e).  Rewriting through
// expm1 keeps precision when h rounds to 1 (near-ergodic regime at
// gamma = 1/2, where the true argument can be as small as exp(-500)).
inline double log_arg_exp(double gamma, double e) {
  return (1.0 - 2.0 * gamma) - 2.0 * gamma * std::expm1(-e);
}

// Same for h = 1/(1 + q): 1 - 2 gamma h = ((1 - 2 gamma) + q)/(1 + q).
// The numerator must group (1 - 2 gamma) first: summing 1 + q before the
// subtraction rounds q away below 2^-53 and turns the near-ergodic tail at
// gamma = 1/2 into an exact zero.
inline double log_arg_rational(double gamma, double q) {
  return ((1.0 - 2.0 * gamma) + q) / (1.0 + q);
}

[[noreturn]] void throw_singular(const ensemble_spec& spec, int k, int l,
                                 double arg) {
  std::ostringstream os;
  os << "lambda sum: singular term at cell (" << k << ", " << l << ") for "
     << family_name(spec.fam) << ": |1 - 2 gamma h| = " << std::abs(arg)
     << " < " << k_singular_tol;
  throw singular_term_error(os.str());
}

// Accumulates one evolved cell of the closed-form sum.  `h` is the profile
// value (used for the equilibrium exclusion), `arg` the stable log argument.
// A vanishing argument is an error only when a finite-parameter singularity
// exists (gamma > 1/2); at gamma <= 1/2 the argument stays positive for all
// finite parameters and a tiny value is the legitimate near-ergodic
// asymptotic, not a pathology.
inline void add_closed_term(const ensemble_spec& spec, int k, int l, double h,
                            double arg, kahan_sum& acc) {
  if (std::abs(1.0 - spec.gamma * h) < k_equilibrium_tol) return;
  if (std::abs(arg) < k_singular_tol && spec.gamma > 0.5 + 1e-12)
    throw_singular(spec, k, l, arg);
  acc.add(std::log(std::abs(arg)));
}

double closed_form_be(const ensemble_spec& spec) {
  // All evolved cells (l >= 2) share one variance; the sum is a multiple of
  // a single term.
  const double h = 1.0 / (1.0 + spec.mu);
  if (std::abs(1.0 - spec.gamma * h) < k_equilibrium_tol) return 0.0;
  const double arg = log_arg_rational(spec.gamma, spec.mu);
  if (std::abs(arg) < k_singular_tol && spec.gamma > 0.5 + 1e-12)
    throw_singular(spec, 1, 2, arg);
  const double cells =
      static_cast<double>(spec.n_a()) * (spec.n_b() - 1);
  return -cells * std::log(std::abs(arg)) / (2.0 * spec.gamma);
}

double closed_form_pe(const ensemble_spec& spec) {
  kahan_sum acc;
  for (int k = 1; k <= spec.n_a(); ++k) {
    for (int l = 2; l <= spec.n_b(); ++l) {
      const double x = static_cast<double>(k) * (l - 1);
      const double q = x / spec.mu;
      const double h = 1.0 / (1.0 + q);
      add_closed_term(spec, k, l, h, log_arg_rational(spec.gamma, q), acc);
    }
  }
  return -acc.s / (2.0 * spec.gamma);
}

double closed_form_ee(const ensemble_spec& spec) {
  kahan_sum acc;
  for (int k = 1; k <= spec.n_a(); ++k) {
    for (int l = 2; l <= spec.n_b(); ++l) {
      const double x = static_cast<double>(k) * (l - 1);
      double e = x / spec.mu;
      if (spec.ee_squared) e *= e;
      const double h = std::exp(-e);
      add_closed_term(spec, k, l, h, log_arg_exp(spec.gamma, e), acc);
    }
  }
  return -acc.s / (2.0 * spec.gamma);
}

double closed_form_se(const ensemble_spec& spec) {
  kahan_sum acc;
  const double w2 = spec.w * spec.w;
  const double ws2 = spec.w_s * spec.w_s;
  for (int k = 1; k <= spec.n_a(); ++k) {
    for (int l = 1; l <= spec.n_b(); ++l) {
      const long long x = static_cast<long long>(k) * (l - 1);
      if (x == 0) continue;  // parameter-independent cell, never evolves
      const int d = hamming_distance(k, l);
      if (d > spec.hamming_radius) continue;  // h = 0 = reference
      const double e = static_cast<double>(x) / (d == 0 ? w2 : ws2);
      const double h = std::exp(-e);
      add_closed_term(spec, k, l, h, log_arg_exp(spec.gamma, e), acc);
    }
  }
  return -acc.s / (2.0 * spec.gamma);
}

ensemble_spec with_param(const ensemble_spec& spec, double p) {
  ensemble_spec s = spec;
  if (spec.fam == family::SE) {
    s.w = spec.w * p;
    s.w_s = spec.w_s * p;
  } else {
    s.mu = p;
  }
  return s;
}

}  // namespace

std::string_view family_name(family f) {
  switch (f) {
    case family::BE: return "BE";
    case family::PE: return "PE";
    case family::EE: return "EE";
    case family::SE: return "SE";
  }
  throw domain_error("family_name: unknown family");
}

family family_from_name(std::string_view name) {
  if (name == "BE") return family::BE;
  if (name == "PE") return family::PE;
  if (name == "EE") return family::EE;
  if (name == "SE") return family::SE;
  throw domain_error("family_from_name: expected one of BE, PE, EE, SE");
}

int hamming_distance(long long k, long long l) {
  if (k < 1 || l < 1)
    throw domain_error("hamming_distance: indices are 1-based");
  const auto a = static_cast<std::uint64_t>(k - 1);
  const auto b = static_cast<std::uint64_t>(l - 1);
  return std::popcount(a ^ b);
}

profile variance_profile(const ensemble_spec& spec) {
  check_spec(spec);
  profile p;
  p.n_a = spec.n_a();
  p.n_b = spec.n_b();
  p.h.assign(static_cast<std::size_t>(p.n_a) * p.n_b, 0.0);

  switch (spec.fam) {
    case family::BE: {
      const double h = 1.0 / (1.0 + spec.mu);
      for (int k = 1; k <= p.n_a; ++k) {
        p.at(k, 1) = 1.0;
        for (int l = 2; l <= p.n_b; ++l) p.at(k, l) = h;
      }
      break;
    }
    case family::PE: {
      for (int k = 1; k <= p.n_a; ++k)
        for (int l = 1; l <= p.n_b; ++l) {
          const double x = static_cast<double>(k) * (l - 1);
          p.at(k, l) = 1.0 / (1.0 + x / spec.mu);
        }
      break;
    }
    case family::EE: {
      for (int k = 1; k <= p.n_a; ++k)
        for (int l = 1; l <= p.n_b; ++l) {
          double e = static_cast<double>(k) * (l - 1) / spec.mu;
          if (spec.ee_squared) e *= e;
          p.at(k, l) = std::exp(-e);
        }
      break;
    }
    case family::SE: {
      const double w2 = spec.w * spec.w;
      const double ws2 = spec.w_s * spec.w_s;
      for (int k = 1; k <= p.n_a; ++k)
        for (int l = 1; l <= p.n_b; ++l) {
          const int d = hamming_distance(k, l);
          if (d > spec.hamming_radius) continue;
          const double x = static_cast<double>(k) * (l - 1);
          p.at(k, l) = std::exp(-x / (d == 0 ? w2 : ws2));
        }
      break;
    }
  }
  return p;
}

profile initial_profile(const ensemble_spec& spec) {
  check_spec(spec);
  profile p;
  p.n_a = spec.n_a();
  p.n_b = spec.n_b();
  p.h.assign(static_cast<std::size_t>(p.n_a) * p.n_b, 0.0);

  if (spec.fam == family::SE) {
    // Zero-exponent cells inside the band keep h = 1 at every parameter
    // value; everything else starts (and for out-of-band cells stays) at 0.
    for (int k = 1; k <= p.n_a; ++k)
      for (int l = 1; l <= p.n_b; ++l)
        if (static_cast<long long>(k) * (l - 1) == 0 &&
            hamming_distance(k, l) <= spec.hamming_radius)
          p.at(k, l) = 1.0;
  } else {
    for (int k = 1; k <= p.n_a; ++k) p.at(k, 1) = 1.0;
  }
  return p;
}

profile ergodic_profile(int n_a, int n_b) {
  if (n_a < 1 || n_b < 1)
    throw domain_error("ergodic_profile: sizes must be positive");
  profile p;
  p.n_a = n_a;
  p.n_b = n_b;
  p.h.assign(static_cast<std::size_t>(n_a) * n_b, 1.0);
  return p;
}

double lambda_closed_form(const ensemble_spec& spec) {
  check_spec(spec);
  switch (spec.fam) {
    case family::BE: return closed_form_be(spec);
    case family::PE: return closed_form_pe(spec);
    case family::EE: return closed_form_ee(spec);
    case family::SE: return closed_form_se(spec);
  }
  throw domain_error("lambda_closed_form: unknown family");
}

double lambda_generic(const ensemble_spec& spec) {
  const profile p = variance_profile(spec);
  const profile p0 = initial_profile(spec);

  // Accumulate per-cell differences of the log functional.  Differencing
  // cell by cell cancels the common normalization of each term exactly;
  // summing the two functionals separately would lose ~6 digits to
  // cancellation at 2^20 cells.
  kahan_sum acc;
  const std::size_t n = p.h.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double h = p.h[i];
    const double h0 = p0.h[i];
    if (h == h0) continue;  // no evolution in this cell
    if (std::abs(1.0 - spec.gamma * h) < k_equilibrium_tol) continue;
    const double a1 = 1.0 - 2.0 * spec.gamma * h;
    const double a0 = 1.0 - 2.0 * spec.gamma * h0;
    if (std::abs(a1) < k_singular_tol || std::abs(a0) < k_singular_tol) {
      if (spec.gamma > 0.5 + 1e-12) {
        const int k = static_cast<int>(i / p.n_b) + 1;
        const int l = static_cast<int>(i % p.n_b) + 1;
        throw_singular(spec, k, l, std::abs(a1) < std::abs(a0) ? a1 : a0);
      }
      // At gamma <= 1/2 the argument never vanishes at finite parameters;
      // an exact zero is the quantization floor of this direct evaluation
      // (h rounded to 1), where the sum diverges at working precision.
      if (a1 == 0.0) return std::numeric_limits<double>::infinity();
      if (a0 == 0.0) return -std::numeric_limits<double>::infinity();
    }
    acc.add(std::log(std::abs(a1)) - std::log(std::abs(a0)));
  }
  return -acc.s / (2.0 * spec.gamma);
}

bool lambda_increasing(family f) { return f != family::BE; }

param_bounds parameter_bounds(const ensemble_spec& spec) {
  check_spec(spec);
  const double g = spec.gamma;
  const bool supercritical = g > 0.5 + 1e-12;
  param_bounds b;
  switch (spec.fam) {
    case family::BE:
      // Lambda decreases with mu; the branch ends where 1 + mu = 2 gamma.
      b.lo = supercritical ? (2.0 * g - 1.0) * (1.0 + 1e-9) : 1e-250;
      b.hi = 1e250;
      break;
    case family::PE:
      b.lo = 1e-250;
      b.hi = supercritical ? (1.0 / (2.0 * g - 1.0)) * (1.0 - 1e-9) : 1e250;
      break;
    case family::EE: {
      b.lo = 1e-250;
      if (supercritical) {
        const double e_star = std::log(2.0 * g);  // first singular exponent, x = 1
        b.hi = (spec.ee_squared ? 1.0 / std::sqrt(e_star) : 1.0 / e_star) *
               (1.0 - 1e-9);
      } else {
        b.hi = 1e250;
      }
      break;
    }
    case family::SE: {
      b.lo = 1e-120;
      if (supercritical) {
        // Smallest evolved exponent over the band fixes the first singular
        // ray scale: e = x / (t w)^2 = ln(2 gamma).
        const double e_star = std::log(2.0 * g);
        double min_coeff = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= spec.n_a(); ++k)
          for (int l = 1; l <= spec.n_b(); ++l) {
            const long long x = static_cast<long long>(k) * (l - 1);
            if (x == 0) continue;
            const int d = hamming_distance(k, l);
            if (d > spec.hamming_radius) continue;
            const double width = d == 0 ? spec.w : spec.w_s;
            min_coeff = std::min(min_coeff,
                                 static_cast<double>(x) / (width * width));
          }
        if (!std::isfinite(min_coeff)) {
          // Band holds no evolved cell; Lambda is identically zero.
          b.hi = 1e120;
        } else {
          b.hi = std::sqrt(min_coeff / e_star) * (1.0 - 1e-9);
        }
      } else {
        b.hi = 1e120;
      }
      break;
    }
  }
  return b;
}

param_bounds lambda_range(const ensemble_spec& spec) {
  const param_bounds pb = parameter_bounds(spec);
  const double la = lambda_closed_form(with_param(spec, pb.lo));
  const double lb = lambda_closed_form(with_param(spec, pb.hi));
  return {std::min(la, lb), std::max(la, lb)};
}

double mu_for_lambda(const ensemble_spec& spec, double lambda_target) {
  check_spec(spec);
  if (!(lambda_target > 0.0) || !std::isfinite(lambda_target))
    throw domain_error("mu_for_lambda: target must be positive and finite");

  const param_bounds pb = parameter_bounds(spec);
  const bool increasing = lambda_increasing(spec.fam);
  double t_lo = std::log(pb.lo);
  double t_hi = std::log(pb.hi);

  auto eval = [&](double t) {
    return lambda_closed_form(with_param(spec, std::exp(t)));
  };

  const double f_lo = eval(t_lo);
  const double f_hi = eval(t_hi);
  const double f_min = std::min(f_lo, f_hi);
  const double f_max = std::max(f_lo, f_hi);
  if (lambda_target < f_min || lambda_target > f_max) {
    std::ostringstream os;
    os << "mu_for_lambda: target " << lambda_target
       << " outside attainable range [" << f_min << ", " << f_max << "] for "
       << family_name(spec.fam) << " at gamma = " << spec.gamma;
    throw domain_error(os.str());
  }

  const double rel_tol = 1e-8;
  double best_t = t_lo;
  double best_err = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    const double t_mid = 0.5 * (t_lo + t_hi);
    const double f_mid = eval(t_mid);
    const double err = std::abs(f_mid - lambda_target) / lambda_target;
    if (err < best_err) {
      best_err = err;
      best_t = t_mid;
    }
    if (err <= rel_tol) return std::exp(t_mid);
    const bool go_right = increasing ? (f_mid < lambda_target)
                                     : (f_mid > lambda_target);
    if (go_right)
      t_lo = t_mid;
    else
      t_hi = t_mid;
    if (t_hi - t_lo < 1e-15 * std::max(1.0, std::abs(t_lo))) break;
  }
  if (best_err <= rel_tol) return std::exp(best_t);
  std::ostringstream os;
  os << "mu_for_lambda: bisection stalled at relative error " << best_err
     << " for target " << lambda_target;
  throw numerical_error(os.str());
}

ensemble_spec spec_for_lambda(const ensemble_spec& spec, double lambda_target) {
  return with_param(spec, mu_for_lambda(spec, lambda_target));
}

}  // namespace entlab
