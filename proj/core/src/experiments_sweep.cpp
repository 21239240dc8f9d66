#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "entlab/experiments.hpp"
#include "entlab/parallel.hpp"
#include "entlab/rng.hpp"
#include "entlab/sampler.hpp"
#include "entlab/theory.hpp"

namespace entlab {
namespace {

// Stream-key tags separating the experiment stages; every grid point draws
// from its own (seed, sample) streams, so reruns and worker counts cannot
// change any sample.
enum : std::uint64_t {
  tag_probe = 0x70726f62,
  tag_final = 0x66696e61,
  tag_ergodic = 0x6572676f,
  tag_sizes = 0x73697a65,
};

std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * i / (n - 1.0));
  return v;
}

// Piecewise-linear interpolation on sorted xs; xq must lie inside the range.
double interp(const std::vector<double>& xs, const std::vector<double>& ys,
              double xq) {
  const auto it = std::lower_bound(xs.begin(), xs.end(), xq);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  const double t = (xq - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

sweep_point measure_lambda_point(const ensemble_spec& tmpl, double lambda,
                                 long long samples, std::uint64_t seed,
                                 int workers) {
  const double p = mu_for_lambda(tmpl, lambda);
  ensemble_spec solved = tmpl;
  if (tmpl.fam == family::SE) {
    solved.w = tmpl.w * p;
    solved.w_s = tmpl.w_s * p;
  } else {
    solved.mu = p;
  }

  sweep_point pt;
  pt.fam = solved.fam;
  pt.l_a = solved.l_a;
  pt.l_b = solved.l_b;
  pt.gamma = solved.gamma;
  pt.param = tmpl.fam == family::SE ? solved.w : solved.mu;
  pt.lambda = lambda_closed_form(solved);
  pt.seed = seed;
  pt.stats =
      measure_point(variance_profile(solved), samples, seed, workers);
  return pt;
}

// With a non-null sink, a point that cannot be solved or measured becomes a
// warning instead of aborting the grid.
std::vector<sweep_point> run_grid(const ensemble_spec& tmpl,
                                  const std::vector<double>& grid,
                                  long long samples, std::uint64_t stage_seed,
                                  int workers,
                                  std::vector<std::string>* warnings) {
  std::vector<sweep_point> pts;
  pts.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      pts.push_back(measure_lambda_point(tmpl, grid[i], samples,
                                         mix_key(stage_seed, i), workers));
    } catch (const error& e) {
      if (!warnings) throw;
      warnings->push_back("grid point skipped: " +
                          std::string(family_name(tmpl.fam)) +
                          " lambda=" + std::to_string(grid[i]) + ": " +
                          e.what());
    }
  }
  if (pts.size() < 4)
    throw numerical_error("run_grid: fewer than four usable grid points");
  return pts;
}

struct curve_view {
  std::vector<double> lambda, r1, r1e, r2, r2e;
};

curve_view view_of(const std::vector<sweep_point>& pts) {
  curve_view v;
  for (const auto& p : pts) {
    v.lambda.push_back(p.lambda);
    v.r1.push_back(p.stats.r1_mean);
    v.r1e.push_back(p.stats.r1_err);
    v.r2.push_back(p.stats.r2_mean);
    v.r2e.push_back(p.stats.r2_err);
  }
  return v;
}

void fit_both(family_sweep& fs) {
  const curve_view v = view_of(fs.points);
  const double l_a = fs.base.l_a;
  fs.fit1 = fit_bracket(v.lambda, v.r1, v.r1e, l_a);
  fs.fit2 = fit_bracket(v.lambda, v.r2, v.r2e, l_a);
  for (auto& p : fs.points) p.lambda_ent = p.lambda / fs.fit1.d;
}

// Probe stage of the two-stage automatic grid: a broad sweep anchored on the
// system size gives rough rescaling constants for both entropy indices.
std::vector<double> rough_ds(const ensemble_spec& tmpl,
                             const sweep_config& cfg,
                             std::vector<std::string>* warnings) {
  const double n_total =
      static_cast<double>(tmpl.n_a()) * static_cast<double>(tmpl.n_b());
  const std::vector<double> probe = geomspace(1.0, 20.0 * n_total, 15);
  std::vector<sweep_point> pts =
      run_grid(tmpl, probe, cfg.probe_samples,
               mix_key(mix_key(cfg.seed, tag_probe),
                       static_cast<std::uint64_t>(tmpl.fam)),
               cfg.workers, warnings);
  const curve_view v = view_of(pts);
  return {fit_bracket(v.lambda, v.r1, v.r1e, tmpl.l_a).d,
          fit_bracket(v.lambda, v.r2, v.r2e, tmpl.l_a).d};
}

}  // namespace

std::vector<entropy_record> measure_records(const profile& p,
                                            long long samples,
                                            std::uint64_t seed, int workers) {
  if (samples < 1)
    throw domain_error("measure_records: need at least one sample");
  std::vector<entropy_record> records(static_cast<std::size_t>(samples));
  parallel_for(samples, workers, [&](std::int64_t i) {
    const state_matrix m =
        draw_sample(p, seed, static_cast<std::uint64_t>(i));
    records[static_cast<std::size_t>(i)] = entropies(schmidt_spectrum(m));
  });
  return records;
}

point_stats measure_point(const profile& p, long long samples,
                          std::uint64_t seed, int workers) {
  const auto records = measure_records(p, samples, seed, workers);
  return aggregate(records);
}

ergodic_moments ergodic_calibration(int n_a, int n_b, long long samples,
                                    std::uint64_t seed, int workers) {
  using key_t = std::tuple<int, int, long long, std::uint64_t>;
  static std::map<key_t, ergodic_moments> cache;
  static std::mutex cache_mutex;
  const key_t key{n_a, n_b, samples, seed};
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  ergodic_moments em;
  em.n_a = n_a;
  em.n_b = n_b;
  em.stats = measure_point(ergodic_profile(n_a, n_b), samples,
                           mix_key(seed, tag_ergodic), workers);
  em.r0_infinity = n_a * (em.stats.r1_mean + q0_factor(n_a, n_b));

  std::lock_guard<std::mutex> lock(cache_mutex);
  cache.emplace(key, em);
  return em;
}

ensemble_spec base_spec(const sweep_config& cfg, family f) {
  ensemble_spec s;
  s.fam = f;
  s.l_a = cfg.l_a;
  s.l_b = cfg.l_b;
  s.gamma = cfg.gamma;
  s.mu = 1.0;
  s.w = 1.0;
  s.w_s = cfg.se_ray;
  s.hamming_radius = cfg.se_hamming_radius;
  s.ee_squared = cfg.ee_squared;
  return s;
}

bracket_fit fit_bracket(std::span<const double> lambda,
                        std::span<const double> y,
                        std::span<const double> err, double l_a) {
  if (lambda.size() != y.size() || lambda.size() < 4)
    throw domain_error("fit_bracket: need at least four points");

  const double a0 = *std::max_element(y.begin(), y.end());
  if (!(a0 > 0))
    throw numerical_error("fit_bracket: no positive response in the data");

  // Half-rise abscissa seeds the scale parameter.
  double d0 = lambda[lambda.size() / 2];
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= 0.5 * a0) {
      d0 = lambda[i];
      break;
    }
  }

  std::vector<double> weights;
  if (!err.empty()) {
    const double floor_err = 1e-3 * a0;
    weights.resize(err.size());
    for (std::size_t i = 0; i < err.size(); ++i) {
      const double e = std::max(err[i], floor_err);
      weights[i] = 1.0 / (e * e);
    }
  }

  const double log_la = std::log(l_a);
  const curve_fn model = [log_la](double x, std::span<const double> p) {
    // p = (amplitude, ln D); exponent -Lambda/D in base L_A.
    return p[0] * (1.0 - std::exp(-x * std::exp(-p[1]) * log_la));
  };

  const curve_fit_result fit = fit_curve(
      model, lambda, y, weights, {a0, std::log(d0)},
      {{0.2 * a0, 3.0 * a0}, {std::log(d0) - 9.0, std::log(d0) + 9.0}});

  bracket_fit out;
  out.amplitude = fit.params[0];
  out.d = std::exp(fit.params[1]);
  out.r_squared = fit.r_squared;
  return out;
}

universality_result universality_sweep(const sweep_config& cfg,
                                       std::vector<std::string>* warnings) {
  if (cfg.families.empty())
    throw domain_error("universality_sweep: no families requested");

  universality_result res;
  for (const family f : cfg.families) {
    const ensemble_spec tmpl = base_spec(cfg, f);
    family_sweep fs;
    fs.base = tmpl;

    std::vector<double> grid = cfg.lambda_grid;
    if (grid.empty()) {
      const auto ds = rough_ds(tmpl, cfg, warnings);
      fs.d1_rough = ds[0];
      fs.d2_rough = ds[1];
      const double lo = 0.5 * cfg.ent_lo * std::min(ds[0], ds[1]);
      const double hi = 1.5 * cfg.ent_hi * std::max(ds[0], ds[1]);
      const int n = std::clamp(
          static_cast<int>(std::ceil(6.5 * std::log10(hi / lo))), 24, 40);
      grid = geomspace(lo, hi, n);
    }

    fs.points = run_grid(tmpl, grid, cfg.samples,
                         mix_key(mix_key(cfg.seed, tag_final),
                                 static_cast<std::uint64_t>(f)),
                         cfg.workers, warnings);
    fit_both(fs);
    res.families.push_back(std::move(fs));
  }

  // Pairwise deviations on a common rescaled grid, interpolating each
  // family's curve linearly in ln(lambda_ent).
  const std::vector<double> test = geomspace(cfg.ent_lo, cfg.ent_hi, 41);
  res.covered = true;

  struct rescaled {
    std::vector<double> lx1, y1, lx2, y2;
  };
  std::vector<rescaled> rs;
  for (const auto& fs : res.families) {
    rescaled r;
    for (const auto& p : fs.points) {
      r.lx1.push_back(std::log(p.lambda / fs.fit1.d));
      r.y1.push_back(p.stats.r1_mean);
      r.lx2.push_back(std::log(p.lambda / fs.fit2.d));
      r.y2.push_back(p.stats.r2_mean);
    }
    if (r.lx1.front() > std::log(cfg.ent_lo) ||
        r.lx1.back() < std::log(cfg.ent_hi) ||
        r.lx2.front() > std::log(cfg.ent_lo) ||
        r.lx2.back() < std::log(cfg.ent_hi))
      res.covered = false;
    rs.push_back(std::move(r));
  }

  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      pair_deviation d;
      d.f1 = res.families[i].base.fam;
      d.f2 = res.families[j].base.fam;
      for (const double t : test) {
        const double lt = std::log(t);
        d.max_dev_r1 = std::max(
            d.max_dev_r1, std::abs(interp(rs[i].lx1, rs[i].y1, lt) -
                                   interp(rs[j].lx1, rs[j].y1, lt)));
        d.max_dev_r2 = std::max(
            d.max_dev_r2, std::abs(interp(rs[i].lx2, rs[i].y2, lt) -
                                   interp(rs[j].lx2, rs[j].y2, lt)));
      }
      res.deviations.push_back(d);
    }
  }
  return res;
}

dscaling_result extract_d(const dscaling_config& cfg,
                          std::vector<std::string>* warnings) {
  if (cfg.l_a_min < 2 || cfg.l_a_max < cfg.l_a_min)
    throw domain_error("extract_d: need 2 <= l_a_min <= l_a_max");

  dscaling_result res;
  res.fam = cfg.fam;
  for (int la = cfg.l_a_min; la <= cfg.l_a_max; ++la) {
    sweep_config sc;
    sc.families = {cfg.fam};
    sc.l_a = la;
    sc.l_b = la;
    sc.gamma = cfg.gamma;
    // The largest sizes dominate the budget; trim them without losing the
    // rise region the fit needs.
    sc.samples = la >= 9 ? (3 * cfg.samples) / 4 : cfg.samples;
    sc.probe_samples = 48;
    sc.seed = mix_key(mix_key(cfg.seed, tag_sizes),
                      static_cast<std::uint64_t>(la));
    sc.workers = cfg.workers;
    sc.se_hamming_radius = cfg.se_hamming_radius;
    sc.se_ray = cfg.se_ray;
    sc.ee_squared = cfg.ee_squared;

    const ensemble_spec tmpl = base_spec(sc, cfg.fam);
    family_sweep fs;
    fs.base = tmpl;
    const auto ds = rough_ds(tmpl, sc, warnings);
    fs.d1_rough = ds[0];
    fs.d2_rough = ds[1];
    const double lo = 0.02 * std::min(ds[0], ds[1]);
    const double hi = 50.0 * std::max(ds[0], ds[1]);
    const int n = la >= 9 ? 16 : 18;
    fs.points = run_grid(tmpl, geomspace(lo, hi, n), sc.samples,
                         mix_key(sc.seed, tag_final), sc.workers, warnings);
    fit_both(fs);

    res.l_a.push_back(la);
    res.d1.push_back(fs.fit1.d);
    res.d2.push_back(fs.fit2.d);
    res.sweeps.push_back(std::move(fs));
  }

  std::vector<double> xs(res.l_a.begin(), res.l_a.end());
  res.fit1 = fit_exponential(xs, res.d1);
  res.fit2 = fit_exponential(xs, res.d2);
  return res;
}

}  // namespace entlab
