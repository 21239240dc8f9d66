#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "entlab/csv.hpp"
#include "entlab/digest.hpp"
#include "entlab/parallel.hpp"
#include "entlab/rng.hpp"
#include "entlab/runner.hpp"
#include "entlab/sampler.hpp"
#include "entlab/theory.hpp"
#include "entlab/version.hpp"

namespace entlab {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t tag_oracle = 0x6f72636c;
constexpr std::uint64_t tag_theory_calib = 0x7468636c;

// Exclusive ownership of the output directory for the run's duration.
class dir_lock {
 public:
  explicit dir_lock(const fs::path& dir) : path_(dir / ".lock") {
    const int fd =
        ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST)
        throw io_error("output directory " + dir.string() +
                       " is locked by another run (remove .lock if stale)");
      throw io_error("cannot create lock file " + path_.string());
    }
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%ld\n", (long)::getpid());
    if (n > 0) {
      // best effort: the pid is advisory, the file's existence is the lock
      [[maybe_unused]] const auto ignored = ::write(fd, buf, (size_t)n);
    }
    ::close(fd);
  }
  ~dir_lock() { ::unlink(path_.c_str()); }
  dir_lock(const dir_lock&) = delete;
  dir_lock& operator=(const dir_lock&) = delete;

 private:
  fs::path path_;
};

std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  const double r = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) out.push_back(lo * std::exp(r * i));
  out.back() = hi;
  return out;
}

// Everything an experiment produces for serialization.
struct artifacts {
  std::vector<sweep_point> points;
  std::vector<theory_row> curve;
  bool is_curve = false;  // theory runs emit `curve` as points.csv
  std::vector<derived_row> derived;
  std::map<std::string, double> summary;
  int exit_code = 0;
};

artifacts drive_sweep(const run_config& cfg,
                      std::vector<std::string>& warnings) {
  artifacts a;
  const universality_result res = universality_sweep(cfg.sweep, &warnings);

  for (const auto& fsw : res.families) {
    a.points.insert(a.points.end(), fsw.points.begin(), fsw.points.end());
    const std::string fam{family_name(fsw.base.fam)};
    const int la = fsw.base.l_a, lb = fsw.base.l_b;
    auto row = [&](const char* name, double v) {
      a.derived.push_back({"bracket_fit", fam, la, lb, name, v});
    };
    row("d1", fsw.fit1.d);
    row("amplitude1", fsw.fit1.amplitude);
    row("r_squared1", fsw.fit1.r_squared);
    row("d2", fsw.fit2.d);
    row("amplitude2", fsw.fit2.amplitude);
    row("r_squared2", fsw.fit2.r_squared);
    row("d1_rough", fsw.d1_rough);
    row("d2_rough", fsw.d2_rough);
  }

  double max1 = 0, max2 = 0;
  for (const auto& d : res.deviations) {
    const std::string pair =
        std::string(family_name(d.f1)) + ":" + std::string(family_name(d.f2));
    a.derived.push_back({"universality", pair, cfg.sweep.l_a, cfg.sweep.l_b,
                         "max_dev_r1", d.max_dev_r1});
    a.derived.push_back({"universality", pair, cfg.sweep.l_a, cfg.sweep.l_b,
                         "max_dev_r2", d.max_dev_r2});
    max1 = std::max(max1, d.max_dev_r1);
    max2 = std::max(max2, d.max_dev_r2);
  }
  a.derived.push_back({"universality", "", cfg.sweep.l_a, cfg.sweep.l_b,
                       "covered", res.covered ? 1.0 : 0.0});

  a.summary["n_points"] = static_cast<double>(a.points.size());
  a.summary["max_dev_r1"] = max1;
  a.summary["max_dev_r2"] = max2;
  a.summary["covered"] = res.covered ? 1.0 : 0.0;
  return a;
}

artifacts drive_fitd(const run_config& cfg,
                     std::vector<std::string>& warnings) {
  artifacts a;
  const dscaling_result res = extract_d(cfg.fitd, &warnings);
  const std::string fam{family_name(res.fam)};

  for (const auto& fsw : res.sweeps)
    a.points.insert(a.points.end(), fsw.points.begin(), fsw.points.end());
  for (std::size_t i = 0; i < res.l_a.size(); ++i) {
    a.derived.push_back(
        {"d_by_size", fam, res.l_a[i], res.l_a[i], "d1", res.d1[i]});
    a.derived.push_back(
        {"d_by_size", fam, res.l_a[i], res.l_a[i], "d2", res.d2[i]});
  }
  auto row = [&](const char* name, double v) {
    a.derived.push_back(
        {"d_fit", fam, cfg.fitd.l_a_min, cfg.fitd.l_a_max, name, v});
  };
  row("a1", res.fit1.a);
  row("b1", res.fit1.b);
  row("r_squared1", res.fit1.r_squared);
  row("a2", res.fit2.a);
  row("b2", res.fit2.b);
  row("r_squared2", res.fit2.r_squared);

  a.summary["a1"] = res.fit1.a;
  a.summary["b1"] = res.fit1.b;
  a.summary["r_squared1"] = res.fit1.r_squared;
  a.summary["a2"] = res.fit2.a;
  a.summary["b2"] = res.fit2.b;
  a.summary["r_squared2"] = res.fit2.r_squared;
  a.summary["n_points"] = static_cast<double>(a.points.size());
  return a;
}

artifacts drive_fss(const run_config& cfg,
                    std::vector<std::string>& warnings) {
  artifacts a;
  const alpha_curves curves = alpha_sweep(cfg.fss, &warnings);
  const collapse_result col = collapse(curves);
  const std::string fam{family_name(cfg.fss.fam)};

  for (std::size_t s = 0; s < curves.l_total.size(); ++s) {
    const int la = curves.l_total[s] / 2;
    for (std::size_t ai = 0; ai < curves.alpha.size(); ++ai) {
      sweep_point pt;
      pt.fam = cfg.fss.fam;
      pt.l_a = la;
      pt.l_b = la;
      pt.gamma = cfg.fss.gamma;
      pt.param = curves.mu[s][ai];
      pt.lambda = curves.lambda[s][ai];
      pt.lambda_ent = 0;
      pt.stats = curves.stats[s][ai];
      pt.seed = curves.seed[s][ai];
      a.points.push_back(pt);
    }
    // Exact-vs-asymptotic complexity parameter: worst relative gap per size.
    double gap = 0;
    for (std::size_t ai = 0; ai < curves.alpha.size(); ++ai)
      gap = std::max(gap, std::abs(curves.lambda[s][ai] -
                                   curves.lambda_asym[s][ai]) /
                              curves.lambda[s][ai]);
    a.derived.push_back(
        {"lambda_asym", fam, la, la, "max_rel_gap", gap});
  }

  for (const auto& p : col.crossing.pairs) {
    a.derived.push_back({"crossing", fam, p.l_i, p.l_j, "alpha_x", p.alpha_x});
    a.derived.push_back({"crossing", fam, p.l_i, p.l_j, "r_x", p.r_x});
  }
  auto crow = [&](const char* name, double v) {
    a.derived.push_back({"crossing", fam, 0, 0, name, v});
  };
  crow("alpha_star", col.crossing.alpha_star);
  crow("r_star", col.crossing.r_star);
  crow("alpha_spread", col.crossing.alpha_spread);
  crow("r_spread", col.crossing.r_spread);

  auto krow = [&](const char* name, double v) {
    a.derived.push_back({"collapse", fam, 0, 0, name, v});
  };
  krow("alpha_star", col.alpha_star);
  krow("nu", col.nu);
  krow("cost", col.cost);
  krow("r_star", col.r_star);
  krow("cost_ratio_min", col.cost_ratio_min);
  krow("alpha_band_lo", col.alpha_band_lo);
  krow("alpha_band_hi", col.alpha_band_hi);
  krow("nu_band_lo", col.nu_band_lo);
  krow("nu_band_hi", col.nu_band_hi);
  krow("r_cross_band_lo", col.r_cross_band_lo);
  krow("r_cross_band_hi", col.r_cross_band_hi);
  krow("bootstrap", static_cast<double>(col.bootstrap));

  a.summary["alpha_star"] = col.alpha_star;
  a.summary["nu"] = col.nu;
  a.summary["cost"] = col.cost;
  a.summary["cost_ratio_min"] = col.cost_ratio_min;
  a.summary["r_star"] = col.r_star;
  a.summary["n_points"] = static_cast<double>(a.points.size());
  return a;
}

artifacts drive_cutscan(const run_config& cfg,
                        std::vector<std::string>& warnings) {
  artifacts a;
  const cutscan_result res = cut_scan(cfg.cut, &warnings);
  for (std::size_t fi = 0; fi < res.points.size(); ++fi) {
    const std::string fam{family_name(cfg.cut.families[fi])};
    for (std::size_t ti = 0; ti < res.points[fi].size(); ++ti) {
      const auto& row = res.points[fi][ti];
      a.points.insert(a.points.end(), row.begin(), row.end());
      a.derived.push_back(
          {"cut_maximum", fam, 0, cfg.cut.l_total,
           "l_m[" + format_double(cfg.cut.lambda_targets[ti]) + "]",
           static_cast<double>(res.l_m[fi][ti])});
    }
  }
  a.summary["n_points"] = static_cast<double>(a.points.size());
  return a;
}

artifacts drive_theory(const run_config& cfg,
                       std::vector<std::string>& warnings) {
  artifacts a;
  a.is_curve = true;
  const auto& t = cfg.theory;

  theory_params base;
  base.beta = t.beta;
  base.gamma = t.gamma;
  base.n_a = 1 << t.l_a;
  base.n_b = 1 << t.l_b;
  base.d1 = t.d1;
  base.d2 = t.d2;
  base.eq16_variant = t.eq16_variant;

  double r0inf = t.r0_infinity;
  double qinf = t.q_infinity;
  if (r0inf == 0 || qinf == 0) {
    const ergodic_moments em =
        ergodic_calibration(base.n_a, base.n_b, t.calib_samples,
                            mix_key(cfg.seed, tag_theory_calib), cfg.workers);
    if (r0inf == 0) r0inf = em.r0_infinity;
    if (qinf == 0) qinf = em.stats.q_mean;
  }
  theory_params pr0 = base;
  pr0.tau = t.tau1;
  pr0.r0_infinity = r0inf;
  theory_params pq = base;
  pq.tau = t.tau2;

  const double d1_here = d_of_size(t.d1, t.l_a);
  const double d2_here = d_of_size(t.d2, t.l_a);
  for (const double lambda :
       geomspace(t.lambda_lo, t.lambda_hi, t.n_points)) {
    theory_row row;
    row.lambda = lambda;
    row.lambda_ent = lambda / d1_here;
    row.r1_pred = r_n_of_lambda(1, lambda, pr0, r0inf);
    row.r2_pred = r_n_of_lambda(2, lambda, pq, qinf);
    try {
      row.r0_pred = r0_of_lambda(lambda, pr0);
    } catch (const domain_error&) {
      row.r0_pred = std::numeric_limits<double>::quiet_NaN();
      if (a.curve.empty())
        warnings.push_back(
            "r0 curve undefined at lambda <= 1; such rows carry nan");
    }
    row.q_pred = q_of_lambda(lambda, pq);
    a.curve.push_back(row);
  }

  auto row = [&](const char* name, double v) {
    a.derived.push_back({"theory", "", t.l_a, t.l_b, name, v});
  };
  row("d1_at_l_a", d1_here);
  row("d2_at_l_a", d2_here);
  row("tau1_resolved", t.tau1 != 0 ? t.tau1 : 1.0 / d1_here);
  row("tau2_resolved", t.tau2 != 0 ? t.tau2 : 1.0 / d2_here);
  row("r0_infinity", r0inf);
  row("q_infinity", qinf);
  row("beta", t.beta);
  row("gamma", t.gamma);

  a.summary["n_points"] = static_cast<double>(a.curve.size());
  a.summary["r0_infinity"] = r0inf;
  a.summary["q_infinity"] = qinf;
  return a;
}

// End-to-end equivalence gate for the two complexity-parameter routes over
// randomized specs on all families, kept well clear of singular cells.
artifacts drive_oracle(const run_config& cfg,
                       std::vector<std::string>& warnings) {
  artifacts a;
  const auto& oc = cfg.oracle;

  double max_dev = 0;
  std::string worst;
  for (long long trial = 0; trial < oc.trials; ++trial) {
    counter_rng rng(mix_key(cfg.seed, tag_oracle),
                    static_cast<std::uint64_t>(trial));
    ensemble_spec spec;
    spec.fam = static_cast<family>(rng.next_u64() % 4);
    spec.l_a = 1 + static_cast<int>(rng.next_u64() % 4);
    spec.l_b =
        spec.l_a + static_cast<int>(rng.next_u64() % (6 - spec.l_a));
    spec.gamma = 0.3 + 0.9 * rng.uniform();
    const double log_2g = spec.gamma > 0.5 + 1e-9
                              ? std::log(2.0 * spec.gamma)
                              : 0.0;  // 0 marks "no singular branch"

    switch (spec.fam) {
      case family::BE:
        spec.mu = (spec.gamma > 0.5 ? 2.0 * spec.gamma - 1.0 : 0.0) + 0.1 +
                  9.9 * rng.uniform();
        break;
      case family::PE: {
        const double hi =
            spec.gamma > 0.5 ? 0.9 / (2.0 * spec.gamma - 1.0) : 9.0;
        spec.mu = (0.05 + 0.90 * rng.uniform()) * std::min(9.0, hi);
        break;
      }
      case family::EE: {
        spec.ee_squared = rng.next_u64() % 2 == 0;
        // Keep the continuation of h through 1/(2 gamma) away from integer
        // exponents: mu sqrt(log 2g) (squared) or mu log 2g stays <= 0.45.
        double hi = 5.0;
        if (log_2g > 0)
          hi = std::min(hi, spec.ee_squared ? 0.45 / std::sqrt(log_2g)
                                            : 0.45 / log_2g);
        spec.mu = (0.05 + 0.90 * rng.uniform()) * hi;
        break;
      }
      case family::SE: {
        spec.hamming_radius = static_cast<int>(rng.next_u64() % 4);
        double hi = 1.5;
        if (log_2g > 0) hi = std::min(hi, std::sqrt(0.45 / log_2g));
        spec.w = 0.2 + (hi - 0.2) * rng.uniform();
        spec.w_s = 0.2 + (hi - 0.2) * rng.uniform();
        break;
      }
    }

    const double closed = lambda_closed_form(spec);
    const double generic = lambda_generic(spec);
    const double dev = std::abs(closed - generic) / std::max(1.0, std::abs(closed));
    if (dev > max_dev) {
      max_dev = dev;
      worst = std::string(family_name(spec.fam)) + " trial " +
              std::to_string(trial);
    }
  }

  const bool pass = max_dev <= oc.tol;
  if (!pass)
    warnings.push_back("oracle check failed: max relative deviation " +
                       format_double(max_dev) + " at " + worst);

  a.derived.push_back(
      {"oracle", "", 0, 0, "trials", static_cast<double>(oc.trials)});
  a.derived.push_back({"oracle", "", 0, 0, "max_rel_dev", max_dev});
  a.derived.push_back({"oracle", "", 0, 0, "tol", oc.tol});
  a.derived.push_back({"oracle", "", 0, 0, "pass", pass ? 1.0 : 0.0});
  a.summary["trials"] = static_cast<double>(oc.trials);
  a.summary["max_rel_dev"] = max_dev;
  a.summary["pass"] = pass ? 1.0 : 0.0;
  a.exit_code = pass ? 0 : 1;
  return a;
}

void write_file(const fs::path& p, const std::string& contents) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + p.string() + " for writing");
  out.write(contents.data(),
            static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw io_error("short write to " + p.string());
}

// Raw draws of the first measured point, re-generated from its recorded seed
// (identical matrices to the measurement by the sampler's seeding contract).
std::size_t dump_first_point(const fs::path& p, const run_config& cfg,
                             const sweep_point& pt) {
  ensemble_spec spec;
  spec.fam = pt.fam;
  spec.l_a = pt.l_a;
  spec.l_b = pt.l_b;
  spec.gamma = pt.gamma;
  spec.hamming_radius = cfg.sweep.se_hamming_radius;
  spec.ee_squared = cfg.sweep.ee_squared;
  if (pt.fam == family::SE) {
    spec.w = pt.param;
    spec.w_s = cfg.sweep.se_ray * pt.param;
  } else {
    spec.mu = pt.param;
  }
  const profile prof = variance_profile(spec);

  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + p.string() + " for writing");
  for (long long i = 0; i < pt.stats.n; ++i) {
    const state_matrix m =
        draw_sample_raw(prof, pt.seed, static_cast<std::uint64_t>(i));
    for (const auto& z : m.c) {
      const double re = z.real(), im = z.imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  }
  out.flush();
  if (!out) throw io_error("short write to " + p.string());
  return static_cast<std::size_t>(pt.stats.n);
}

}  // namespace

run_result run(const run_config& cfg) {
  const validation_report rep = validate(cfg);
  if (!rep.ok()) {
    std::string msg = "invalid config";
    for (const auto& e : rep.errors()) msg += "\n  " + e;
    throw config_error(msg);
  }

  run_result result;
  result.output_dir = fs::path(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(result.output_dir, ec);
  if (ec)
    throw io_error("cannot create output directory " +
                   result.output_dir.string() + ": " + ec.message());
  dir_lock lock(result.output_dir);

  for (const auto& w : rep.warnings()) result.warnings.push_back(w);

  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  auto last = t0;
  std::vector<std::pair<std::string, double>> stages;
  auto mark = [&](const char* name) {
    const auto now = std::chrono::steady_clock::now();
    stages.emplace_back(name,
                        std::chrono::duration<double>(now - last).count());
    last = now;
  };

  artifacts art;
  switch (cfg.kind) {
    case experiment_kind::sweep: art = drive_sweep(cfg, result.warnings); break;
    case experiment_kind::fit_d: art = drive_fitd(cfg, result.warnings); break;
    case experiment_kind::fss: art = drive_fss(cfg, result.warnings); break;
    case experiment_kind::cutscan:
      art = drive_cutscan(cfg, result.warnings);
      break;
    case experiment_kind::theory:
      art = drive_theory(cfg, result.warnings);
      break;
    case experiment_kind::oracle_check:
      art = drive_oracle(cfg, result.warnings);
      break;
  }
  mark("experiment");

  {
    std::ostringstream os;
    if (art.is_curve)
      write_theory_csv(os, art.curve, cfg.log_base);
    else
      write_points_csv(os, art.points, cfg.log_base);
    write_file(result.output_dir / "points.csv", os.str());
  }
  {
    std::ostringstream os;
    write_derived_csv(os, art.derived);
    write_file(result.output_dir / "derived.csv", os.str());
  }
  std::size_t dumped = 0;
  if (cfg.dump_samples && !art.points.empty())
    dumped = dump_first_point(result.output_dir / "samples.bin", cfg,
                              art.points.front());
  mark("serialize");

  std::vector<std::string> output_names{"points.csv", "derived.csv"};
  if (dumped) output_names.push_back("samples.bin");
  ordered_json outputs = ordered_json::object();
  for (const auto& name : output_names) {
    const fs::path p = result.output_dir / name;
    const std::string digest = sha256_file(p);
    outputs[name] = {{"bytes", fs::file_size(p)}, {"sha256", digest}};
    result.digests[name] = digest;
  }
  mark("digest");

  const auto finished = std::chrono::system_clock::now();
  ordered_json manifest;
  manifest["tool"] = "entlab";
  manifest["version"] = version_string;
  manifest["experiment"] = experiment_name(cfg.kind);
  manifest["seed"] = cfg.seed;
  manifest["workers_requested"] = cfg.workers;
  manifest["workers_resolved"] = resolve_workers(cfg.workers);
  manifest["log_base"] = cfg.log_base == 2 ? "2" : "e";
  manifest["started"] = iso8601_utc(started);
  manifest["finished"] = iso8601_utc(finished);
  manifest["duration_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  ordered_json jstages = ordered_json::array();
  for (const auto& [name, seconds] : stages)
    jstages.push_back({{"name", name}, {"seconds", seconds}});
  manifest["stages"] = jstages;
  ordered_json jsummary = ordered_json::object();
  for (const auto& [k, v] : art.summary) jsummary[k] = v;
  manifest["summary"] = jsummary;
  manifest["warnings"] = result.warnings;
  if (dumped) {
    manifest["samples_dumped"] = dumped;
    manifest["sample_layout"] =
        "row-major complex doubles (re, im), native little-endian";
  }
  manifest["outputs"] = outputs;
  manifest["exit_code"] = art.exit_code;
  manifest["config_path"] = cfg.source_path;
  manifest["config"] = cfg.source_text;

  // The manifest is the commit marker: written only after every other
  // artifact is complete and digested.
  write_file(result.output_dir / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& [k, v] : art.summary) result.summary[k] = v;
  result.exit_code = art.exit_code;
  return result;
}

}  // namespace entlab
