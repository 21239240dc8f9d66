#pragma once

// Counter-based random streams.  Every sample of every run is generated from
// an independent stream keyed by (seed, stream index), so results are
// bit-for-bit reproducible regardless of worker count or scheduling order.
// The generator and the normal transform are implemented here rather than
// taken from <random> because libstdc++ leaves distribution sequences
// implementation-defined, which would break cross-version determinism.

#include <cmath>
#include <cstdint>
#include <utility>

namespace entlab {

/// One splitmix64 step.  Used for seeding and key derivation only.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Folds one tag into a key.  Chained to derive hierarchical stream keys,
/// e.g. run seed -> experiment -> grid point -> sample index.
inline std::uint64_t mix_key(std::uint64_t key, std::uint64_t tag) {
  std::uint64_t x = key ^ (tag * 0xd1342543de82ef95ull + 0x9e3779b97f4a7c15ull);
  return splitmix64(x);
}

/// xoshiro256++ stream seeded from a (seed, stream) pair via splitmix64.
class counter_rng {
 public:
  counter_rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = mix_key(seed, stream);
    for (auto& w : s_) w = splitmix64(x);
    // All-zero state is the one fixed point of xoshiro; unreachable in
    // practice but cheap to rule out.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 0x9e3779b97f4a7c15ull;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double strictly inside (0, 1): ((u >> 11) + 0.5) * 2^-53.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Two independent standard normals via the Box-Muller transform.
  /// No rejection step, so stream consumption is fixed at two uniforms.
  std::pair<double, double> normal_pair() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace entlab
