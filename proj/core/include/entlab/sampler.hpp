#pragma once

// Drawing state matrices from a variance profile.
//
// Entry (k, l) of a raw draw is sqrt(h(k, l)) * (z1 + i z2) with z1, z2
// independent standard normals, so each component has variance h(k, l).
// The returned state matrix is Frobenius-normalized to unit norm.
// Sample `index` of a batch always consumes its own random stream keyed by
// (seed, index); results are identical for any worker count.

#include <complex>
#include <cstdint>
#include <vector>

#include "entlab/ensembles.hpp"

namespace entlab {

/// Row-major complex state matrix.
struct state_matrix {
  int n_a = 0;
  int n_b = 0;
  std::vector<std::complex<double>> c;

  std::complex<double> at(int k, int l) const {  // 1-based
    return c[static_cast<std::size_t>(k - 1) * n_b + (l - 1)];
  }
};

/// One un-normalized draw from the profile.  Cells with h = 0 are exact
/// zeros and consume no randomness.
state_matrix draw_sample_raw(const profile& p, std::uint64_t seed,
                             std::uint64_t index);

/// Frobenius-normalized draw (unit trace of C C^dagger).
state_matrix draw_sample(const profile& p, std::uint64_t seed,
                         std::uint64_t index);

/// Draws `count` normalized samples in index order.
std::vector<state_matrix> draw_batch(const profile& p, std::uint64_t seed,
                                     std::uint64_t count);

}  // namespace entlab
