#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "entlab/experiments.hpp"
#include "entlab/rng.hpp"

namespace entlab {
namespace {

constexpr std::uint64_t tag_fss = 0x66737377;
constexpr std::uint64_t tag_boot = 0x626f6f74;

double harmonic(int n) {
  double s = 0;
  for (int i = 1; i <= n; ++i) s += 1.0 / i;
  return s;
}

// Large-mu (BE) / small-coupling (PE, EE) asymptote of the complexity
// parameter, reported alongside the exact value as a regime diagnostic.
double lambda_asymptotic(const ensemble_spec& spec) {
  const double n_a = static_cast<double>(spec.n_a());
  const double n_b = static_cast<double>(spec.n_b());
  switch (spec.fam) {
    case family::BE:
      return n_a * (n_b - 1) / spec.mu;
    case family::PE:
      return spec.mu * harmonic(static_cast<int>(n_a)) *
             harmonic(static_cast<int>(n_b) - 1);
    case family::EE:
      // mu * E1(1/mu), E1 the exponential integral.
      return spec.mu * (-std::expint(-1.0 / spec.mu));
    default:
      throw domain_error("lambda_asymptotic: no closed asymptote for family");
  }
}

double median(std::vector<double> v) {
  if (v.empty()) throw domain_error("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double idx = p * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (idx - lo) * (v[hi] - v[lo]);
}

// Windowed local-linear estimate of a master curve at x0: weighted least
// squares over points within the window (expanded to the nearest five points
// when the window is underpopulated).
double local_linear(const std::vector<double>& xs, const std::vector<double>& ys,
                    double x0, double half_width) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(xs[i] - x0) <= half_width) idx.push_back(i);
  if (idx.size() < 5) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(xs[a] - x0) < std::abs(xs[b] - x0);
    });
    idx.resize(std::min<std::size_t>(5, n));
  }

  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (const std::size_t i : idx) {
    const double dx = xs[i] - x0;
    sw += 1;
    swx += dx;
    swy += ys[i];
    swxx += dx * dx;
    swxy += dx * ys[i];
  }
  const double det = sw * swxx - swx * swx;
  if (std::abs(det) < 1e-30) return swy / sw;  // degenerate: constant fit
  return (swy * swxx - swx * swxy) / det;      // intercept at dx = 0
}

struct flat_curves {
  std::vector<double> alpha, y, l;  // one row per (size, alpha) point
};

flat_curves flatten(const alpha_curves& c) {
  flat_curves f;
  for (std::size_t s = 0; s < c.l_total.size(); ++s)
    for (std::size_t a = 0; a < c.alpha.size(); ++a) {
      f.alpha.push_back(c.alpha[a]);
      f.y.push_back(c.r1_mean[s][a]);
      f.l.push_back(static_cast<double>(c.l_total[s]));
    }
  return f;
}

double cost_of(const flat_curves& f, double alpha_star, double nu) {
  if (!(nu > 0.05)) return 1e6;
  const std::size_t n = f.alpha.size();
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = (f.alpha[i] - alpha_star) * std::pow(f.l[i], 1.0 / nu);

  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  const double half_width = (*mx - *mn) / 20.0;  // window = range / 10

  double y_mean = 0;
  for (const double y : f.y) y_mean += y;
  y_mean /= static_cast<double>(n);
  double var = 0;
  for (const double y : f.y) var += (y - y_mean) * (y - y_mean);
  var /= static_cast<double>(n);
  if (var <= 0) return 0;

  double res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double yhat = local_linear(xs, f.y, xs[i], half_width);
    res += (f.y[i] - yhat) * (f.y[i] - yhat);
  }
  return res / (static_cast<double>(n) * var);
}

crossing_result crossing_of(const std::vector<int>& l_total,
                            const std::vector<double>& alpha,
                            const std::vector<std::vector<double>>& y) {
  // First pass: every sign change of every pair difference is a candidate.
  struct candidate {
    std::size_t i, j;
    double ax, rx;
  };
  std::vector<candidate> cands;
  for (std::size_t i = 0; i < l_total.size(); ++i) {
    for (std::size_t j = i + 1; j < l_total.size(); ++j) {
      for (std::size_t a = 0; a + 1 < alpha.size(); ++a) {
        const double d0 = y[i][a] - y[j][a];
        const double d1 = y[i][a + 1] - y[j][a + 1];
        if (d0 == 0.0 && d1 == 0.0) continue;
        if ((d0 <= 0.0 && d1 > 0.0) || (d0 >= 0.0 && d1 < 0.0) ||
            (d0 < 0.0 && d1 >= 0.0) || (d0 > 0.0 && d1 <= 0.0)) {
          const double t = d0 / (d0 - d1);
          const double ax = alpha[a] + t * (alpha[a + 1] - alpha[a]);
          const double yi = y[i][a] + t * (y[i][a + 1] - y[i][a]);
          const double yj = y[j][a] + t * (y[j][a + 1] - y[j][a]);
          cands.push_back({i, j, ax, 0.5 * (yi + yj)});
        }
      }
    }
  }
  if (cands.empty())
    throw numerical_error("find_crossing: no size-curve crossings in the grid");

  // Second pass: one crossing per pair, the candidate nearest the overall
  // median (guards against stray sign flips from Monte Carlo noise).
  std::vector<double> all_ax;
  for (const auto& c : cands) all_ax.push_back(c.ax);
  const double m = median(all_ax);

  crossing_result res;
  for (std::size_t i = 0; i < l_total.size(); ++i) {
    for (std::size_t j = i + 1; j < l_total.size(); ++j) {
      const candidate* best = nullptr;
      for (const auto& c : cands)
        if (c.i == i && c.j == j &&
            (!best || std::abs(c.ax - m) < std::abs(best->ax - m)))
          best = &c;
      if (best)
        res.pairs.push_back(
            {l_total[i], l_total[j], best->ax, best->rx});
    }
  }

  std::vector<double> axs, rxs;
  for (const auto& p : res.pairs) {
    axs.push_back(p.alpha_x);
    rxs.push_back(p.r_x);
  }
  res.alpha_star = median(axs);
  res.r_star = median(rxs);
  const auto [a_mn, a_mx] = std::minmax_element(axs.begin(), axs.end());
  const auto [r_mn, r_mx] = std::minmax_element(rxs.begin(), rxs.end());
  res.alpha_spread = *a_mx - *a_mn;
  res.r_spread = *r_mx - *r_mn;
  return res;
}

}  // namespace

alpha_curves alpha_sweep(const fss_config& cfg,
                         std::vector<std::string>* warnings) {
  if (cfg.fam == family::SE)
    throw domain_error("alpha_sweep: needs a single-coupling family (BE, PE, EE)");
  if (cfg.l_total.empty())
    throw domain_error("alpha_sweep: no system sizes requested");
  for (const int l : cfg.l_total)
    if (l % 2 != 0 || l < 4)
      throw domain_error("alpha_sweep: sizes must be even (balanced cuts)");
  if (!(cfg.alpha_step > 0) || !(cfg.alpha_hi > cfg.alpha_lo))
    throw domain_error("alpha_sweep: ill-formed alpha grid");
  if (!(cfg.alpha_lo > 0.0) || !(cfg.alpha_hi < 2.0))
    throw domain_error("alpha_sweep: alpha grid must lie inside (0, 2)");

  alpha_curves out;
  out.cfg = cfg;
  out.l_total = cfg.l_total;
  for (double a = cfg.alpha_lo; a <= cfg.alpha_hi + 1e-12;
       a += cfg.alpha_step)
    out.alpha.push_back(a);

  const double c1 = cfg.fam == family::BE ? 1.0 / cfg.c : cfg.c;
  const std::uint64_t sweep_seed = mix_key(cfg.seed, tag_fss);
  std::vector<bool> dead(out.alpha.size(), false);

  for (std::size_t s = 0; s < cfg.l_total.size(); ++s) {
    const int l_a = cfg.l_total[s] / 2;
    const double n_a = std::exp2(l_a);

    std::vector<double> means, errs, mus, lambdas, asym;
    std::vector<point_stats> stats;
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<double>> samples_by_alpha;
    for (std::size_t ai = 0; ai < out.alpha.size(); ++ai) {
      const double alpha = out.alpha[ai];
      const double expo = cfg.fam == family::BE ? alpha : 2.0 - alpha;
      const double mu = c1 * std::pow(n_a, expo);

      ensemble_spec spec;
      spec.fam = cfg.fam;
      spec.l_a = l_a;
      spec.l_b = l_a;
      spec.gamma = cfg.gamma;
      spec.mu = mu;

      const std::uint64_t pt_seed =
          mix_key(mix_key(sweep_seed, static_cast<std::uint64_t>(s)),
                  static_cast<std::uint64_t>(ai));

      mus.push_back(mu);
      seeds.push_back(pt_seed);
      try {
        const auto records = measure_records(
            variance_profile(spec), cfg.samples, pt_seed, cfg.workers);
        const point_stats st = aggregate(records);

        means.push_back(st.r1_mean);
        errs.push_back(st.r1_err);
        stats.push_back(st);
        lambdas.push_back(lambda_closed_form(spec));
        asym.push_back(lambda_asymptotic(spec));

        std::vector<double> r1s;
        r1s.reserve(records.size());
        for (const auto& r : records) r1s.push_back(r.r1);
        samples_by_alpha.push_back(std::move(r1s));
      } catch (const error& e) {
        if (!warnings) throw;
        dead[ai] = true;
        warnings->push_back("fss point skipped (alpha column dropped): L=" +
                            std::to_string(cfg.l_total[s]) +
                            " alpha=" + std::to_string(alpha) + ": " +
                            e.what());
        const double nan = std::numeric_limits<double>::quiet_NaN();
        means.push_back(nan);
        errs.push_back(nan);
        stats.emplace_back();
        lambdas.push_back(nan);
        asym.push_back(nan);
        samples_by_alpha.emplace_back();
      }
    }
    out.r1_mean.push_back(std::move(means));
    out.r1_err.push_back(std::move(errs));
    out.mu.push_back(std::move(mus));
    out.lambda.push_back(std::move(lambdas));
    out.lambda_asym.push_back(std::move(asym));
    out.stats.push_back(std::move(stats));
    out.seed.push_back(std::move(seeds));
    out.r1_samples.push_back(std::move(samples_by_alpha));
  }

  // A failed point invalidates its whole alpha column: drop it everywhere so
  // the size curves remain rectangular and aligned.
  if (std::find(dead.begin(), dead.end(), true) != dead.end()) {
    const auto compact = [&](auto& rows) {
      for (auto& row : rows) {
        auto dst = row.begin();
        for (std::size_t ai = 0; ai < dead.size(); ++ai)
          if (!dead[ai]) *dst++ = std::move(row[ai]);
        row.erase(dst, row.end());
      }
    };
    compact(out.r1_mean);
    compact(out.r1_err);
    compact(out.mu);
    compact(out.lambda);
    compact(out.lambda_asym);
    compact(out.stats);
    compact(out.seed);
    compact(out.r1_samples);
    auto dst = out.alpha.begin();
    for (std::size_t ai = 0; ai < dead.size(); ++ai)
      if (!dead[ai]) *dst++ = out.alpha[ai];
    out.alpha.erase(dst, out.alpha.end());
    if (out.alpha.size() < 4)
      throw numerical_error(
          "alpha_sweep: too few surviving alpha columns for an analysis");
  }
  return out;
}

crossing_result find_crossing(const alpha_curves& curves) {
  return crossing_of(curves.l_total, curves.alpha, curves.r1_mean);
}

double collapse_cost(const alpha_curves& curves, double alpha_star,
                     double nu) {
  return cost_of(flatten(curves), alpha_star, nu);
}

collapse_result collapse(const alpha_curves& curves) {
  const flat_curves flat = flatten(curves);
  const crossing_result cross = find_crossing(curves);

  const double a_lo = curves.alpha.front();
  const double a_hi = curves.alpha.back();
  const auto objective = [&](std::span<const double> p) {
    return cost_of(flat, p[0], p[1]);
  };

  minimize_options mo;
  mo.seed = mix_key(curves.cfg.seed, 0x636f6c6c);
  const min_result m =
      minimize(objective, {cross.alpha_star, 0.5},
               {{a_lo, a_hi}, {0.15, 3.0}}, mo);

  collapse_result res;
  res.alpha_star = m.x[0];
  res.nu = m.x[1];
  res.cost = m.f;
  res.crossing = cross;
  res.bootstrap = curves.cfg.bootstrap;

  {  // master-curve ordinate at zero scaling argument
    const std::size_t n = flat.alpha.size();
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
      xs[i] = (flat.alpha[i] - res.alpha_star) *
              std::pow(flat.l[i], 1.0 / res.nu);
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    res.r_star = local_linear(xs, flat.y, 0.0, (*mx - *mn) / 20.0);
  }

  // Perturbation probes: the optimum must beat displaced parameters by a
  // wide margin, otherwise the collapse landscape is flat and meaningless.
  const double probes[3][2] = {{res.alpha_star + 0.3, res.nu},
                               {res.alpha_star - 0.3, res.nu},
                               {res.alpha_star, 2.0 * res.nu}};
  double ratio_min = std::numeric_limits<double>::infinity();
  for (const auto& pr : probes) {
    const double c = cost_of(flat, std::clamp(pr[0], a_lo, a_hi), pr[1]);
    ratio_min = std::min(ratio_min, c / std::max(res.cost, 1e-300));
  }
  res.cost_ratio_min = ratio_min;

  // Sample-level bootstrap: resample each point's entropy samples, rebuild
  // the curves, re-derive crossing and collapse.  Streams are keyed by the
  // replicate index, so the band is reproducible.
  std::vector<double> b_alpha, b_nu, b_rcross;
  alpha_curves rep = curves;  // reuse the grid layout; overwrite the means
  for (int b = 0; b < curves.cfg.bootstrap; ++b) {
    counter_rng rng(mix_key(curves.cfg.seed, tag_boot),
                    static_cast<std::uint64_t>(b));
    for (std::size_t s = 0; s < curves.l_total.size(); ++s)
      for (std::size_t a = 0; a < curves.alpha.size(); ++a) {
        const auto& src = curves.r1_samples[s][a];
        const std::size_t ns = src.size();
        double acc = 0;
        for (std::size_t k = 0; k < ns; ++k)
          acc += src[rng.next_u64() % ns];
        rep.r1_mean[s][a] = acc / static_cast<double>(ns);
      }

    try {
      const crossing_result bc =
          crossing_of(rep.l_total, rep.alpha, rep.r1_mean);
      const flat_curves bf = flatten(rep);
      minimize_options bmo;
      bmo.restarts = 1;
      bmo.seed = mix_key(mo.seed, static_cast<std::uint64_t>(b));
      const min_result bm =
          minimize([&](std::span<const double> p) {
                     return cost_of(bf, p[0], p[1]);
                   },
                   {res.alpha_star, res.nu}, {{a_lo, a_hi}, {0.15, 3.0}},
                   bmo);
      b_alpha.push_back(bm.x[0]);
      b_nu.push_back(bm.x[1]);
      b_rcross.push_back(bc.r_star);
    } catch (const numerical_error&) {
      // A replicate without crossings carries no band information.
    }
  }

  if (b_alpha.size() >= 20) {
    res.alpha_band_lo = percentile(b_alpha, 0.025);
    res.alpha_band_hi = percentile(b_alpha, 0.975);
    res.nu_band_lo = percentile(b_nu, 0.025);
    res.nu_band_hi = percentile(b_nu, 0.975);
    res.r_cross_band_lo = percentile(b_rcross, 0.025);
    res.r_cross_band_hi = percentile(b_rcross, 0.975);
  }
  return res;
}

}  // namespace entlab
