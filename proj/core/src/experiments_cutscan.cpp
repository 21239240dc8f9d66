#include <cmath>

#include "entlab/experiments.hpp"
#include "entlab/rng.hpp"

namespace entlab {

namespace {
constexpr std::uint64_t tag_cut = 0x63757473;
}

// Scans the bipartition cut l_a = 1 .. l_total/2 at fixed total size and
// fixed complexity parameter: the ensemble parameter is re-solved per cut so
// every point of a row sits at the same Lambda target.
cutscan_result cut_scan(const cutscan_config& cfg,
                        std::vector<std::string>* warnings) {
  if (cfg.l_total < 4 || cfg.l_total > 40)
    throw domain_error("cut_scan: l_total out of range [4, 40]");
  if (cfg.families.empty() || cfg.lambda_targets.empty())
    throw domain_error("cut_scan: empty family or target list");
  if (cfg.samples < 2) throw domain_error("cut_scan: needs samples >= 2");

  const int cut_max = cfg.l_total / 2;
  const std::uint64_t scan_seed = mix_key(cfg.seed, tag_cut);

  cutscan_result res;
  res.cfg = cfg;
  for (std::size_t fi = 0; fi < cfg.families.size(); ++fi) {
    const std::uint64_t fam_seed =
        mix_key(scan_seed, static_cast<std::uint64_t>(fi));
    std::vector<std::vector<sweep_point>> rows;
    std::vector<int> maxima;
    for (std::size_t ti = 0; ti < cfg.lambda_targets.size(); ++ti) {
      const double target = cfg.lambda_targets[ti];
      const std::uint64_t row_seed =
          mix_key(fam_seed, static_cast<std::uint64_t>(ti));
      std::vector<sweep_point> row;
      for (int l_a = 1; l_a <= cut_max; ++l_a) {
        ensemble_spec base;
        base.fam = cfg.families[fi];
        base.l_a = l_a;
        base.l_b = cfg.l_total - l_a;
        base.gamma = cfg.gamma;
        base.hamming_radius = cfg.se_hamming_radius;
        base.ee_squared = cfg.ee_squared;
        base.w = 1.0;
        base.w_s = cfg.se_ray;

        const std::uint64_t pt_seed =
            mix_key(row_seed, static_cast<std::uint64_t>(l_a));
        try {
          const ensemble_spec solved = spec_for_lambda(base, target);

          sweep_point pt;
          pt.fam = solved.fam;
          pt.l_a = solved.l_a;
          pt.l_b = solved.l_b;
          pt.gamma = solved.gamma;
          pt.param = solved.fam == family::SE ? solved.w : solved.mu;
          pt.lambda = lambda_closed_form(solved);
          pt.lambda_ent = 0;  // no bracket fit in this experiment
          pt.seed = pt_seed;
          pt.stats = measure_point(variance_profile(solved), cfg.samples,
                                   pt_seed, cfg.workers);
          row.push_back(std::move(pt));
        } catch (const error& e) {
          if (!warnings) throw;
          warnings->push_back(
              "cut point skipped: " + std::string(family_name(base.fam)) +
              " lambda=" + std::to_string(target) +
              " l_a=" + std::to_string(l_a) + ": " + e.what());
        }
      }
      if (row.empty())
        throw numerical_error("cut_scan: an entire row failed to measure");

      std::size_t best = 0;
      for (std::size_t i = 1; i < row.size(); ++i)
        if (row[i].stats.r1_mean > row[best].stats.r1_mean) best = i;
      maxima.push_back(row[best].l_a);
      rows.push_back(std::move(row));
    }
    res.points.push_back(std::move(rows));
    res.l_m.push_back(std::move(maxima));
  }
  return res;
}

}  // namespace entlab
