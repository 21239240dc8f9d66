// Microbenchmarks for the hot paths: drawing states, the Schmidt
// decomposition, entropy evaluation, the two complexity-parameter routes,
// and the collapse cost.  Sizes are given as log2 of the subsystem
// dimension, matching the experiment configs.

#include <cmath>
#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "entlab/ensembles.hpp"
#include "entlab/experiments.hpp"
#include "entlab/measures.hpp"
#include "entlab/sampler.hpp"

using namespace entlab;

namespace {

ensemble_spec balanced_spec(family f, int l_a, double mu) {
  ensemble_spec s;
  s.fam = f;
  s.l_a = l_a;
  s.l_b = l_a;
  s.gamma = 0.5;
  s.mu = mu;
  return s;
}

void bm_draw_sample(benchmark::State& state) {
  const profile p =
      variance_profile(balanced_spec(family::BE, static_cast<int>(state.range(0)), 1.0));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(draw_sample(p, 42, i++));
}
BENCHMARK(bm_draw_sample)->Arg(6)->Arg(8);

void bm_schmidt_spectrum(benchmark::State& state) {
  const profile p =
      variance_profile(balanced_spec(family::BE, static_cast<int>(state.range(0)), 1.0));
  const state_matrix m = draw_sample(p, 42, 0);
  for (auto _ : state) benchmark::DoNotOptimize(schmidt_spectrum(m));
}
BENCHMARK(bm_schmidt_spectrum)->Arg(6)->Arg(8)->Arg(9);

void bm_entropies(benchmark::State& state) {
  const profile p = variance_profile(balanced_spec(family::BE, 8, 1.0));
  const spectrum s = schmidt_spectrum(draw_sample(p, 42, 0));
  for (auto _ : state) benchmark::DoNotOptimize(entropies(s));
}
BENCHMARK(bm_entropies);

void bm_lambda_closed_form(benchmark::State& state) {
  const ensemble_spec s = balanced_spec(family::PE, 8, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(lambda_closed_form(s));
}
BENCHMARK(bm_lambda_closed_form);

void bm_lambda_generic(benchmark::State& state) {
  const ensemble_spec s = balanced_spec(family::PE, 8, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(lambda_generic(s));
}
BENCHMARK(bm_lambda_generic);

void bm_collapse_cost(benchmark::State& state) {
  alpha_curves curves;
  curves.l_total = {12, 14, 16, 18};
  for (double a = 0.95; a <= 1.75 + 1e-12; a += 0.05)
    curves.alpha.push_back(a);
  for (const int l : curves.l_total) {
    std::vector<double> mean, err;
    for (const double a : curves.alpha) {
      mean.push_back(6.0 / (1.0 + std::exp(0.08 * (a - 1.3) * l * l)));
      err.push_back(1e-3);
    }
    curves.r1_mean.push_back(mean);
    curves.r1_err.push_back(err);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(collapse_cost(curves, 1.3, 0.5));
}
BENCHMARK(bm_collapse_cost);

}  // namespace

BENCHMARK_MAIN();
