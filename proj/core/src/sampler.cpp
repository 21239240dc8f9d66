#include "entlab/sampler.hpp"

#include <cmath>

#include "entlab/errors.hpp"
#include "entlab/rng.hpp"

namespace entlab {

state_matrix draw_sample_raw(const profile& p, std::uint64_t seed,
                             std::uint64_t index) {
  state_matrix m;
  m.n_a = p.n_a;
  m.n_b = p.n_b;
  m.c.assign(p.h.size(), {0.0, 0.0});

  counter_rng rng(seed, index);
  const std::size_t n = p.h.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double h = p.h[i];
    if (h == 0.0) continue;
    const auto [z1, z2] = rng.normal_pair();
    const double s = std::sqrt(h);
    m.c[i] = {s * z1, s * z2};
  }
  return m;
}

state_matrix draw_sample(const profile& p, std::uint64_t seed,
                         std::uint64_t index) {
  state_matrix m = draw_sample_raw(p, seed, index);

  // Fixed row-major accumulation order keeps the normalization exactly
  // reproducible; long double absorbs rounding over ~10^6 entries.
  long double ss = 0.0L;
  for (const auto& z : m.c)
    ss += static_cast<long double>(z.real()) * z.real() +
          static_cast<long double>(z.imag()) * z.imag();
  if (ss <= 0.0L)
    throw numerical_error("draw_sample: all-zero draw, profile has no support");

  const double inv = 1.0 / std::sqrt(static_cast<double>(ss));
  for (auto& z : m.c) z *= inv;
  return m;
}

std::vector<state_matrix> draw_batch(const profile& p, std::uint64_t seed,
                                     std::uint64_t count) {
  std::vector<state_matrix> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i)
    out.push_back(draw_sample(p, seed, i));
  return out;
}

}  // namespace entlab
