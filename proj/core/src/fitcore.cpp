#include "entlab/fitcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "entlab/rng.hpp"

namespace entlab {
namespace {

double clamp_to(double v, const std::pair<double, double>& b) {
  return std::clamp(v, b.first, b.second);
}

struct simplex_point {
  std::vector<double> x;
  double f = 0;
};

min_result nelder_mead(const std::function<double(std::span<const double>)>& fn,
                       const std::vector<double>& x0,
                       const std::vector<std::pair<double, double>>& bounds,
                       double tol, long long max_iter, long long& evals) {
  const std::size_t n = x0.size();
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return fn(std::span<const double>(x));
  };

  // Initial simplex: x0 plus one displaced vertex per dimension.
  std::vector<simplex_point> s(n + 1);
  s[0].x = x0;
  s[0].f = eval(s[0].x);
  for (std::size_t i = 0; i < n; ++i) {
    s[i + 1].x = x0;
    const double span = bounds[i].second - bounds[i].first;
    double step = std::max(0.05 * std::abs(x0[i]), 0.02 * span);
    if (step == 0.0) step = 1e-4;
    s[i + 1].x[i] = clamp_to(x0[i] + step, bounds[i]);
    if (s[i + 1].x[i] == x0[i])
      s[i + 1].x[i] = clamp_to(x0[i] - step, bounds[i]);
    s[i + 1].f = eval(s[i + 1].x);
  }

  auto order = [&] {
    std::sort(s.begin(), s.end(),
              [](const simplex_point& a, const simplex_point& b) {
                return a.f < b.f;
              });
  };
  order();

  min_result res;
  res.converged = false;
  for (long long iter = 0; iter < max_iter; ++iter) {
    if (std::abs(s[n].f - s[0].f) <=
        tol * (std::abs(s[0].f) + tol)) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += s[i].x[j];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    auto propose = [&](double coeff) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j)
        x[j] = clamp_to(centroid[j] + coeff * (centroid[j] - s[n].x[j]),
                        bounds[j]);
      return x;
    };

    std::vector<double> xr = propose(1.0);  // reflection
    const double fr = eval(xr);
    if (fr < s[0].f) {
      std::vector<double> xe = propose(2.0);  // expansion
      const double fe = eval(xe);
      if (fe < fr) {
        s[n] = {std::move(xe), fe};
      } else {
        s[n] = {std::move(xr), fr};
      }
    } else if (fr < s[n - 1].f) {
      s[n] = {std::move(xr), fr};
    } else {
      std::vector<double> xc = propose(-0.5);  // contraction
      const double fc = eval(xc);
      if (fc < s[n].f) {
        s[n] = {std::move(xc), fc};
      } else {
        for (std::size_t i = 1; i <= n; ++i) {  // shrink toward the best
          for (std::size_t j = 0; j < n; ++j)
            s[i].x[j] = clamp_to(0.5 * (s[i].x[j] + s[0].x[j]), bounds[j]);
          s[i].f = eval(s[i].x);
        }
      }
    }
    order();
  }

  res.x = s[0].x;
  res.f = s[0].f;
  return res;
}

}  // namespace

exp_fit fit_exponential(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw domain_error("fit_exponential: need at least two matched points");
  for (const double v : y)
    if (!(v > 0.0))
      throw domain_error("fit_exponential: y values must be positive");

  const std::size_t n = x.size();
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) ly[i] = std::log2(y[i]);

  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0)
    throw domain_error("fit_exponential: x values are all identical");

  exp_fit out;
  out.b = sxy / sxx;
  out.a = std::exp2(my - out.b * mx);
  if (syy == 0.0) {
    out.r_squared = 1.0;  // constant data fit exactly by b = 0
  } else {
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pred = my + out.b * (x[i] - mx);
      ss_res += (ly[i] - pred) * (ly[i] - pred);
    }
    out.r_squared = 1.0 - ss_res / syy;
  }
  return out;
}

min_result minimize(const std::function<double(std::span<const double>)>& f,
                    std::vector<double> x0,
                    std::vector<std::pair<double, double>> bounds,
                    const minimize_options& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw domain_error("minimize: empty parameter vector");
  if (bounds.size() != n)
    throw domain_error("minimize: bounds size must match dimension");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(bounds[i].first <= bounds[i].second))
      throw domain_error("minimize: inverted bounds");
    x0[i] = clamp_to(x0[i], bounds[i]);
  }

  if (!std::isfinite(f(std::span<const double>(x0))))
    throw domain_error("minimize: objective not finite at the initial point");

  const long long max_iter =
      static_cast<long long>(opts.max_iter_per_dim) * static_cast<long long>(n);
  long long evals = 0;

  min_result best = nelder_mead(f, x0, bounds, opts.tol, max_iter, evals);
  counter_rng rng(opts.seed, 0);
  for (int r = 0; r < opts.restarts; ++r) {
    std::vector<double> start = best.x;
    for (std::size_t i = 0; i < n; ++i) {
      const double span = bounds[i].second - bounds[i].first;
      const double jitter = std::isfinite(span)
                                ? 0.05 * span
                                : 0.10 * std::max(1.0, std::abs(start[i]));
      start[i] = clamp_to(start[i] + (2.0 * rng.uniform() - 1.0) * jitter,
                          bounds[i]);
    }
    min_result trial = nelder_mead(f, start, bounds, opts.tol, max_iter, evals);
    if (trial.f < best.f) best = std::move(trial);
  }
  best.evaluations = evals;
  return best;
}

curve_fit_result fit_curve(const curve_fn& f, std::span<const double> x,
                           std::span<const double> y,
                           std::span<const double> weights,
                           std::vector<double> p0,
                           std::vector<std::pair<double, double>> bounds,
                           const minimize_options& opts) {
  if (x.size() != y.size() || x.empty())
    throw domain_error("fit_curve: need matched non-empty x and y");
  if (!weights.empty() && weights.size() != x.size())
    throw domain_error("fit_curve: weights must match point count");

  auto sse = [&](std::span<const double> p) {
    double acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f(x[i], p);
      acc += (weights.empty() ? 1.0 : weights[i]) * r * r;
    }
    return std::isfinite(acc) ? acc : std::numeric_limits<double>::max();
  };

  const min_result m = minimize(sse, std::move(p0), std::move(bounds), opts);

  curve_fit_result out;
  out.params = m.x;
  out.chi2 = m.f;
  out.converged = m.converged;

  double wsum = 0, mean = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    wsum += w;
    mean += w * y[i];
  }
  mean /= wsum;
  double ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    ss_tot += w * (y[i] - mean) * (y[i] - mean);
  }
  // Zero total variance leaves R^2 undefined; report 0 rather than claiming
  // a perfect fit of constant data.
  out.r_squared = ss_tot > 0 ? 1.0 - m.f / ss_tot : 0.0;
  return out;
}

}  // namespace entlab
