#pragma once

// Small fitting toolbox used by the analysis experiments: log-space
// exponential fits for the D_n size model, weighted nonlinear least squares
// for the bracket law, and a bounded derivative-free minimizer for the
// collapse objective.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "entlab/errors.hpp"

namespace entlab {

/// Least-squares fit of y = a * 2^(b x) performed linearly in log2 y.
/// r_squared is the coefficient of determination of the log-space fit.
struct exp_fit {
  double a = 0;
  double b = 0;
  double r_squared = 0;
};

exp_fit fit_exponential(std::span<const double> x, std::span<const double> y);

struct minimize_options {
  double tol = 1e-10;        // relative improvement termination
  int max_iter_per_dim = 500;
  int restarts = 3;          // jittered restarts from the incumbent best
  std::uint64_t seed = 0x5eedULL;
};

struct min_result {
  std::vector<double> x;
  double f = 0;
  long long evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead with box bounds (proposals are clamped into the box).
min_result minimize(const std::function<double(std::span<const double>)>& f,
                    std::vector<double> x0,
                    std::vector<std::pair<double, double>> bounds,
                    const minimize_options& opts = {});

using curve_fn =
    std::function<double(double x, std::span<const double> params)>;

struct curve_fit_result {
  std::vector<double> params;
  double chi2 = 0;       // weighted sum of squared residuals
  double r_squared = 0;  // weighted coefficient of determination
  bool converged = false;
};

/// Weighted nonlinear least squares through the minimizer.  `weights` are
/// per-point (typically 1/err^2); pass empty for uniform weighting.
curve_fit_result fit_curve(const curve_fn& f, std::span<const double> x,
                           std::span<const double> y,
                           std::span<const double> weights,
                           std::vector<double> p0,
                           std::vector<std::pair<double, double>> bounds,
                           const minimize_options& opts = {});

}  // namespace entlab
