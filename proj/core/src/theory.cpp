#include "entlab/theory.hpp"

#include <cmath>

namespace entlab {
namespace {

void check_sizes(int n_a, int n_b) {
  if (n_a < 2 || n_b < n_a)
    throw domain_error("theory: require n_b >= n_a >= 2");
}

double default_tau(const theory_params& p, int n) {
  if (p.tau > 0.0) return p.tau;
  const d_model& m = n == 1 ? p.d1 : p.d2;
  const double l_a = std::log2(static_cast<double>(p.n_a));
  const double d = m.a * std::exp2(m.b * l_a);
  return 1.0 / d;
}

double r0_inf_or_default(const theory_params& p) {
  if (p.r0_infinity > 0.0) return p.r0_infinity;
  return p.n_a * (r_infinity(1, p.n_a, p.n_b) + q0_factor(p.n_a, p.n_b));
}

}  // namespace

double d_of_size(const d_model& m, int l_a) {
  if (!(m.a > 0.0) || !(m.b >= 0.0))
    throw domain_error("d_of_size: require a > 0 and b >= 0");
  return m.a * std::exp2(m.b * static_cast<double>(l_a));
}

double r_infinity(int n, int n_a, int n_b) {
  check_sizes(n_a, n_b);
  const double N = n_a;
  const double nu0 = n_b - n_a;
  if (n == 1) return std::log(N) - N / (2.0 * (N + nu0));
  if (n == 2) return std::log(N * (N + nu0) / (2.0 * N + nu0 - 1.0));
  throw domain_error("r_infinity: n must be 1 or 2");
}

double q0_factor(int n_a, int n_b) {
  check_sizes(n_a, n_b);
  const double N = n_a;
  const double nu0 = n_b - n_a;
  return (2.0 * N + nu0 - 1.0) / (N + nu0);
}

double chi_factor(int n, int n_a, int n_b, double d) {
  check_sizes(n_a, n_b);
  const double N = n_a;
  const double nu = (n_b - n_a + 1) / 2.0;
  const double denom = N + 2.0 * nu - 1.0;
  if (n == 1) return (N + 2.0 * nu * d - 1.0) / denom;
  if (n == 2) return (N + nu * d - 1.0) / denom;
  throw domain_error("chi_factor: n must be 1 or 2");
}

double r0_of_lambda(double lambda, const theory_params& p) {
  check_sizes(p.n_a, p.n_b);
  if (!(lambda > 1.0))
    throw domain_error("r0_of_lambda: defined for Lambda > 1");
  const double N = p.n_a;
  const double tau = default_tau(p, 1);
  return r0_inf_or_default(p) +
         N * N / (2.0 * p.gamma * tau * (lambda - 1.0));
}

double q_of_lambda(double lambda, const theory_params& p) {
  check_sizes(p.n_a, p.n_b);
  if (!(lambda >= 0.0))
    throw domain_error("q_of_lambda: Lambda must be >= 0");
  const double N = p.n_a;
  const double q2 = p.q2_estimate > 0.0 ? p.q2_estimate : N * N;
  const double tau = default_tau(p, 2);
  const double relax = std::exp(tau * (1.0 - p.beta * lambda / 2.0));
  return relax + (p.beta / (2.0 * N)) * q2 * (1.0 - relax);
}

double r_n_of_lambda(int n, double lambda, const theory_params& p,
                     double g_input) {
  check_sizes(p.n_a, p.n_b);
  if (n != 1 && n != 2)
    throw domain_error("r_n_of_lambda: n must be 1 or 2");
  if (!(lambda >= 0.0))
    throw domain_error("r_n_of_lambda: Lambda must be >= 0");
  const double l_a = std::log2(static_cast<double>(p.n_a));
  if (!(l_a > 1.0))
    throw domain_error("r_n_of_lambda: need l_a > 1, the bracket base is L_A");

  const double N = p.n_a;
  const double g = n == 1 ? g_input / N - q0_factor(p.n_a, p.n_b)
                          : -(2.0 * p.beta / N) * g_input;

  double exponent;
  if (p.eq16_variant) {
    const double tau = default_tau(p, n);
    exponent = -tau * (p.beta * lambda / 2.0 - 1.0);
  } else {
    const d_model& m = n == 1 ? p.d1 : p.d2;
    const double dn = m.a * std::exp2(m.b * l_a);
    exponent = -p.beta * lambda / (2.0 * dn);
  }
  const double bracket = 1.0 - std::pow(l_a, exponent);
  const double sign = n == 1 ? 1.0 : -0.5;
  return sign * g * bracket;
}

}  // namespace entlab
