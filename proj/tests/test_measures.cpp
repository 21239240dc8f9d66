#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <doctest.h>
#include <Eigen/Dense>

#include "entlab/experiments.hpp"
#include "entlab/measures.hpp"
#include "entlab/rng.hpp"
#include "entlab/theory.hpp"

using namespace entlab;

namespace {

state_matrix gaussian_matrix(int n_a, int n_b, std::uint64_t seed,
                             std::uint64_t index) {
  state_matrix m;
  m.n_a = n_a;
  m.n_b = n_b;
  m.c.resize(static_cast<std::size_t>(n_a) * n_b);
  counter_rng rng(seed, index);
  for (auto& z : m.c) {
    const auto [x, y] = rng.normal_pair();
    z = {x, y};
  }
  long double ss = 0.0L;
  for (const auto& z : m.c) ss += std::norm(z);
  const double inv = 1.0 / std::sqrt(static_cast<double>(ss));
  for (auto& z : m.c) z *= inv;
  return m;
}

// Independent spectrum: eigenvalues of the Gram matrix C C^dagger via a
// dense Hermitian eigensolver, the route the library deliberately avoids.
std::vector<double> gram_eigenvalues(const state_matrix& m) {
  Eigen::MatrixXcd g(m.n_a, m.n_a);
  for (int i = 0; i < m.n_a; ++i) {
    for (int j = 0; j < m.n_a; ++j) {
      std::complex<double> acc{0.0, 0.0};
      for (int k = 0; k < m.n_b; ++k)
        acc += m.c[static_cast<std::size_t>(i) * m.n_b + k] *
               std::conj(m.c[static_cast<std::size_t>(j) * m.n_b + k]);
      g(i, j) = acc;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  std::vector<double> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + m.n_a);
  for (double& v : ev) v = std::max(v, 0.0);
  const double sum = std::accumulate(ev.begin(), ev.end(), 0.0);
  for (double& v : ev) v /= sum;
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

spectrum make_spectrum(std::vector<double> lambda) {
  spectrum s;
  s.lambda = std::move(lambda);
  return s;
}

}  // namespace

TEST_CASE("rank-one state has a pure spectrum") {
  state_matrix m;
  m.n_a = 4;
  m.n_b = 4;
  m.c.assign(16, {0.0, 0.0});
  for (int k = 1; k <= 4; ++k) m.c[static_cast<std::size_t>(k - 1) * 4] = {0.5, 0.0};
  const spectrum s = schmidt_spectrum(m);
  REQUIRE(s.lambda.size() == 4);
  CHECK(s.lambda[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.lambda[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  const entropy_record r = entropies(s);
  CHECK(r.r1 == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(r.r2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(r.q == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("scaled identity is maximally entangled") {
  const int n = 8;
  state_matrix m;
  m.n_a = n;
  m.n_b = n;
  m.c.assign(n * n, {0.0, 0.0});
  for (int i = 0; i < n; ++i)
    m.c[static_cast<std::size_t>(i) * n + i] = {1.0 / std::sqrt(8.0), 0.0};
  const spectrum s = schmidt_spectrum(m);
  for (const double v : s.lambda)
    CHECK(v == doctest::Approx(1.0 / n).epsilon(1e-12));
  CHECK(entropies(s).r1 == doctest::Approx(std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("entropies of frozen two-level spectra") {
  const entropy_record r = entropies(make_spectrum({0.75, 0.25}));
  const double r1_expect = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  const double r0_expect = -(std::log(0.75) + std::log(0.25));
  CHECK(r.r1 == doctest::Approx(r1_expect).epsilon(1e-14));
  CHECK(r.r1 == doctest::Approx(0.562335).epsilon(1e-6));
  CHECK(r.r2 == doctest::Approx(-std::log(0.625)).epsilon(1e-14));
  CHECK(r.r2 == doctest::Approx(0.470004).epsilon(1e-6));
  CHECK(r.r0 == doctest::Approx(r0_expect).epsilon(1e-14));
  CHECK(r.r0 == doctest::Approx(1.673976).epsilon(1e-6));
  CHECK(r.q == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(r.s2 == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(r.floored == 0);

  const entropy_record half = entropies(make_spectrum({0.5, 0.5}));
  CHECK(half.r1 == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(half.r2 == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(half.q == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("exact zeros are floored inside r0 and counted") {
  const entropy_record r = entropies(make_spectrum({1.0, 0.0}));
  CHECK(r.r1 == 0.0);  // 0 log 0 := 0
  CHECK(r.r2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(r.q == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.floored == 1);
  CHECK(r.r0 == doctest::Approx(-std::log(k_r0_floor)).epsilon(1e-12));
}

TEST_CASE("spectrum matches an independent Hermitian eigensolver") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const state_matrix m = gaussian_matrix(3, 5, 0xabcd, t);
    const spectrum s = schmidt_spectrum(m);
    const std::vector<double> oracle = gram_eigenvalues(m);
    REQUIRE(s.lambda.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
      CHECK(std::abs(s.lambda[i] - oracle[i]) <= 1e-12);
  }
}

TEST_CASE("spectrum is invariant under column permutations") {
  const state_matrix m = gaussian_matrix(4, 6, 0x9f, 0);
  state_matrix perm = m;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 6; ++l)
      perm.c[static_cast<std::size_t>(k) * 6 + l] =
          m.c[static_cast<std::size_t>(k) * 6 + (l + 2) % 6];
  const spectrum a = schmidt_spectrum(m);
  const spectrum b = schmidt_spectrum(perm);
  for (std::size_t i = 0; i < a.lambda.size(); ++i)
    CHECK(a.lambda[i] == doctest::Approx(b.lambda[i]).epsilon(1e-12));
}

TEST_CASE("spectrum and entropy invariants hold on random draws") {
  for (std::uint64_t t = 0; t < 25; ++t) {
    const state_matrix m = gaussian_matrix(8, 12, 0x77, t);
    const spectrum s = schmidt_spectrum(m);
    double sum = 0;
    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
      CHECK(s.lambda[i] >= 0.0);
      if (i) CHECK(s.lambda[i] <= s.lambda[i - 1]);
      sum += s.lambda[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));

    const entropy_record r = entropies(s);
    CHECK(r.r2 <= r.r1 + 1e-12);
    CHECK(r.r1 <= std::log(8.0) + 1e-12);
    CHECK(r.q >= 1.0 - 1e-12);
    CHECK(r.q <= 8.0 + 1e-12);
    CHECK(r.q * r.s2 == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("mismatched dimensions are rejected") {
  state_matrix m;
  m.n_a = 3;
  m.n_b = 2;
  m.c.assign(4, {0.5, 0.0});  // wrong size for 3x2
  CHECK_THROWS_AS(schmidt_spectrum(m), domain_error);
}

TEST_CASE("aggregate computes unbiased two-point statistics") {
  entropy_record a, b;
  a.r1 = 0.0;
  b.r1 = 1.0;
  const std::vector<entropy_record> recs{a, b};
  const point_stats st = aggregate(recs);
  CHECK(st.r1_mean == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(st.r1_err == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(st.n == 2);

  const std::vector<entropy_record> same{a, a, a};
  const point_stats flat = aggregate(same);
  CHECK(flat.r1_err == 0.0);

  const std::vector<entropy_record> one{a};
  CHECK_THROWS_AS(aggregate(one), domain_error);
}

TEST_CASE("ergodic-limit entropy agrees with the stationary formula") {
  // 500 h = 1 samples at N = 64: the mean von Neumann entropy must land
  // within three standard errors of log N - N / (2 (N + nu0)) = 3.658883.
  const profile p = ergodic_profile(64, 64);
  const point_stats st = measure_point(p, 500, 0xe9d, 0);
  const double page = r_infinity(1, 64, 64);
  CHECK(page == doctest::Approx(3.658883).epsilon(1e-6));
  CHECK(std::abs(st.r1_mean - page) <= 3.0 * st.r1_err);
  // r_infinity(2) is the large-N form with mean purity (2N + nu0 - 1) / N^2;
  // the exact fixed-trace mean is (N + M) / (NM + 1), so the sampled mean of
  // -log S2 sits below the formula by ~0.0076 at N = 64, well outside the
  // 500-sample standard error but above -0.02.
  const double r2_gap = st.r2_mean - r_infinity(2, 64, 64);
  CHECK(r2_gap <= 0.0);
  CHECK(r2_gap >= -0.02);
}
