#include <cmath>
#include <string>

#include <doctest.h>

#include "entlab/ensembles.hpp"
#include "entlab/rng.hpp"

using namespace entlab;

namespace {

// Independent transcription of the per-family variance formulas, 1-based
// indices.  Kept separate from the library so profile bugs cannot cancel.
double reference_h(const ensemble_spec& s, int k, int l) {
  const double x = static_cast<double>(k) * (l - 1);
  switch (s.fam) {
    case family::BE:
      return l == 1 ? 1.0 : 1.0 / (1.0 + s.mu);
    case family::PE:
      return 1.0 / (1.0 + x / s.mu);
    case family::EE:
      return s.ee_squared ? std::exp(-(x / s.mu) * (x / s.mu))
                          : std::exp(-x / s.mu);
    case family::SE: {
      const int d = hamming_distance(k, l);
      if (d == 0) return std::exp(-x / (s.w * s.w));
      if (d <= s.hamming_radius) return std::exp(-x / (s.w_s * s.w_s));
      return 0.0;
    }
  }
  return 0.0;
}

ensemble_spec make_spec(family f, int l_a, int l_b, double gamma) {
  ensemble_spec s;
  s.fam = f;
  s.l_a = l_a;
  s.l_b = l_b;
  s.gamma = gamma;
  return s;
}

// Random parameters kept clear of the gamma > 1/2 singular surfaces, same
// margins for every family.
ensemble_spec random_spec(family f, std::uint64_t seed, std::uint64_t trial) {
  counter_rng rng(seed, trial);
  const int l_a = 1 + static_cast<int>(rng.next_u64() % 4);
  const int l_b = l_a + static_cast<int>(rng.next_u64() % (6 - l_a));
  ensemble_spec s = make_spec(f, l_a, l_b, 0.3 + 0.9 * rng.uniform());
  const double u = rng.uniform();
  switch (f) {
    case family::BE: {
      const double floor_mu = s.gamma > 0.5 ? 2.0 * s.gamma - 1.0 : 0.0;
      s.mu = floor_mu + 0.1 + 9.9 * u;
      break;
    }
    case family::PE: {
      double hi = 9.0;
      if (s.gamma > 0.5) hi = std::min(hi, 0.9 / (2.0 * s.gamma - 1.0));
      s.mu = (0.05 + 0.90 * u) * hi;
      break;
    }
    case family::EE: {
      s.ee_squared = (rng.next_u64() & 1) != 0;
      double hi = 5.0;
      const double lg = std::log(2.0 * s.gamma);
      if (lg > 0)
        hi = std::min(hi, s.ee_squared ? 0.45 / std::sqrt(lg) : 0.45 / lg);
      s.mu = (0.05 + 0.90 * u) * hi;
      break;
    }
    case family::SE: {
      s.hamming_radius = static_cast<int>(rng.next_u64() % 4);
      double hi = 1.5;
      const double lg = std::log(2.0 * s.gamma);
      if (lg > 0) hi = std::min(hi, std::sqrt(0.45 / lg));
      s.w = 0.2 + (hi - 0.2) * u;
      s.w_s = 0.2 + (hi - 0.2) * rng.uniform();
      break;
    }
  }
  return s;
}

}  // namespace

TEST_CASE("hamming distance uses zero-based labels") {
  CHECK(hamming_distance(1, 1) == 0);
  CHECK(hamming_distance(6, 7) == 2);  // 101 vs 110
  CHECK(hamming_distance(1, 2) == 1);
  CHECK(hamming_distance(8, 1) == 3);  // 111 vs 000
  CHECK_THROWS_AS(hamming_distance(0, 1), domain_error);
}

TEST_CASE("variance profiles match the defining formulas") {
  ensemble_spec specs[] = {
      make_spec(family::BE, 2, 3, 1.0),
      make_spec(family::PE, 2, 2, 0.7),
      make_spec(family::EE, 3, 3, 0.5),
      make_spec(family::SE, 2, 3, 1.0),
  };
  specs[0].mu = 3.0;
  specs[1].mu = 0.5;
  specs[2].mu = 1.2;
  specs[3].w = 0.8;
  specs[3].w_s = 0.6;
  specs[3].hamming_radius = 2;
  for (const auto& s : specs) {
    const profile p = variance_profile(s);
    REQUIRE(p.n_a == s.n_a());
    REQUIRE(p.n_b == s.n_b());
    for (int k = 1; k <= p.n_a; ++k)
      for (int l = 1; l <= p.n_b; ++l)
        CHECK(p.at(k, l) == doctest::Approx(reference_h(s, k, l)).epsilon(1e-15));
  }
}

TEST_CASE("ee_squared variant squares the exponent argument") {
  ensemble_spec s = make_spec(family::EE, 1, 2, 0.5);
  s.mu = 2.0;
  s.ee_squared = true;
  const profile p = variance_profile(s);
  CHECK(p.at(1, 2) == doctest::Approx(std::exp(-0.25)).epsilon(1e-15));
}

TEST_CASE("initial profile is the separable reference") {
  ensemble_spec s = make_spec(family::BE, 2, 3, 1.0);
  s.mu = 5.0;
  const profile p0 = initial_profile(s);
  for (int k = 1; k <= p0.n_a; ++k) {
    CHECK(p0.at(k, 1) == 1.0);
    for (int l = 2; l <= p0.n_b; ++l) CHECK(p0.at(k, l) == 0.0);
  }

  ensemble_spec se = make_spec(family::SE, 2, 2, 1.0);
  se.hamming_radius = 1;
  const profile q0 = initial_profile(se);
  for (int k = 1; k <= q0.n_a; ++k) {
    // First column carries exponent 0, so within the band h = 1 always.
    const double expect = hamming_distance(k, 1) <= 1 ? 1.0 : 0.0;
    CHECK(q0.at(k, 1) == expect);
    for (int l = 2; l <= q0.n_b; ++l) CHECK(q0.at(k, l) == 0.0);
  }
}

TEST_CASE("closed-form lambda: frozen hand-evaluated sums") {
  // BE, N_A = N_B = 4, gamma = 1, mu = 3: twelve evolved cells with
  // h = 1/4, each term ln|1 - 1/2|.
  ensemble_spec be = make_spec(family::BE, 2, 2, 1.0);
  be.mu = 3.0;
  CHECK(lambda_closed_form(be) ==
        doctest::Approx(-6.0 * std::log(0.5)).epsilon(1e-13));
  CHECK(lambda_closed_form(be) == doctest::Approx(4.158883).epsilon(1e-6));

  // PE, N_A = N_B = 2, gamma = 1, mu = 0.5: cells k = 1, 2 at l = 2 give
  // h = 1/3 and 1/5.
  ensemble_spec pe = make_spec(family::PE, 1, 1, 1.0);
  pe.mu = 0.5;
  const double pe_expect = -0.5 * (std::log(1.0 / 3.0) + std::log(0.6));
  CHECK(lambda_closed_form(pe) == doctest::Approx(pe_expect).epsilon(1e-13));
  CHECK(lambda_closed_form(pe) == doctest::Approx(0.804719).epsilon(1e-6));

  // EE, N_A = N_B = 2, gamma = 0.4, mu = 1: terms ln(1 - 0.8 e^{-1}) and
  // ln(1 - 0.8 e^{-2}).
  ensemble_spec ee = make_spec(family::EE, 1, 1, 0.4);
  ee.mu = 1.0;
  const double ee_expect =
      -(1.0 / 0.8) *
      (std::log(1.0 - 0.8 * std::exp(-1.0)) + std::log(1.0 - 0.8 * std::exp(-2.0)));
  CHECK(lambda_closed_form(ee) == doctest::Approx(ee_expect).epsilon(1e-13));
}

TEST_CASE("separable limit: lambda vanishes as the profile approaches the reference") {
  ensemble_spec be = make_spec(family::BE, 2, 2, 1.0);
  be.mu = 1e12;
  CHECK(lambda_closed_form(be) < 1e-10);

  ensemble_spec pe = make_spec(family::PE, 2, 2, 1.0);
  pe.mu = 1e-12;
  CHECK(lambda_closed_form(pe) < 1e-9);
}

TEST_CASE("generic route agrees with the closed forms") {
  ensemble_spec be = make_spec(family::BE, 2, 2, 1.0);
  be.mu = 3.0;
  CHECK(lambda_generic(be) ==
        doctest::Approx(lambda_closed_form(be)).epsilon(1e-12));

  ensemble_spec pe = make_spec(family::PE, 1, 1, 1.0);
  pe.mu = 0.5;
  CHECK(lambda_generic(pe) ==
        doctest::Approx(lambda_closed_form(pe)).epsilon(1e-12));
}

TEST_CASE("oracle equivalence over random specs, all families") {
  const family fams[] = {family::BE, family::PE, family::EE, family::SE};
  for (const family f : fams) {
    for (std::uint64_t t = 0; t < 50; ++t) {
      const ensemble_spec s = random_spec(f, 0x1a1a, t);
      const double closed = lambda_closed_form(s);
      const double generic = lambda_generic(s);
      const double tol = 1e-10 * std::max(1.0, closed);
      INFO("family ", family_name(f), " trial ", t);
      CHECK(std::abs(closed - generic) <= tol);
    }
  }
}

TEST_CASE("lambda is monotone along each family's parameter") {
  ensemble_spec be = make_spec(family::BE, 2, 3, 0.5);
  be.mu = 1.0;
  ensemble_spec be2 = be;
  be2.mu = 2.0;
  CHECK(lambda_closed_form(be) > lambda_closed_form(be2));
  CHECK_FALSE(lambda_increasing(family::BE));

  for (const family f : {family::PE, family::EE}) {
    ensemble_spec lo = make_spec(f, 2, 3, 0.5);
    lo.mu = 0.4;
    ensemble_spec hi = lo;
    hi.mu = 0.9;
    CHECK(lambda_closed_form(hi) >= lambda_closed_form(lo));
    CHECK(lambda_increasing(f));
  }
}

TEST_CASE("PE and EE share constants of evolution across equal index products") {
  for (const family f : {family::PE, family::EE}) {
    ensemble_spec s = make_spec(f, 2, 3, 0.8);
    s.mu = 0.7;
    const profile p = variance_profile(s);
    // h depends on k(l-1) only, so (m, n) and (n-1, m+1) coincide whenever
    // both land inside the matrix.
    for (int m = 1; m <= p.n_a; ++m) {
      for (int n = 2; n <= p.n_b; ++n) {
        const int k2 = n - 1, l2 = m + 1;
        if (k2 < 1 || k2 > p.n_a || l2 < 2 || l2 > p.n_b) continue;
        const double r = (1.0 - s.gamma * p.at(k2, l2)) /
                         (1.0 - s.gamma * p.at(m, n));
        CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("singular terms throw and name the offending cell") {
  // gamma = 1, mu = 1: every evolved BE cell has h = 1/2, so 1 - 2 gamma h
  // crosses zero exactly.
  ensemble_spec be = make_spec(family::BE, 2, 2, 1.0);
  be.mu = 1.0;
  CHECK_THROWS_AS(lambda_closed_form(be), singular_term_error);
  CHECK_THROWS_AS(lambda_generic(be), singular_term_error);
  try {
    lambda_closed_form(be);
  } catch (const singular_term_error& e) {
    CHECK(std::string(e.what()).find("cell (") != std::string::npos);
  }

  // PE: cell k = 1, l = 2 has h = 1/(1 + 1/mu) = 1/2 at mu = 1.
  ensemble_spec pe = make_spec(family::PE, 1, 1, 1.0);
  pe.mu = 1.0;
  CHECK_THROWS_AS(lambda_closed_form(pe), singular_term_error);

  // At gamma <= 1/2 the same parameters are regular.
  be.gamma = 0.5;
  CHECK_NOTHROW(lambda_closed_form(be));
}

TEST_CASE("mu_for_lambda inverts the closed form") {
  // BE analytic inverse: mu = 2/(1 - e^{-2 Lambda / (N_A (N_B - 1))}) - 1.
  ensemble_spec be = make_spec(family::BE, 2, 2, 1.0);
  const double target = 4.158883;
  const double mu = mu_for_lambda(be, target);
  const double k_cells = 4.0 * 3.0;
  const double mu_analytic = 2.0 / (1.0 - std::exp(-2.0 * target / k_cells)) - 1.0;
  CHECK(mu == doctest::Approx(mu_analytic).epsilon(1e-7));
  CHECK(mu == doctest::Approx(3.0).epsilon(1e-5));

  ensemble_spec pe = make_spec(family::PE, 1, 1, 1.0);
  CHECK(mu_for_lambda(pe, 0.804719) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("spec_for_lambda round-trips across families") {
  const family fams[] = {family::BE, family::PE, family::EE, family::SE};
  for (const family f : fams) {
    ensemble_spec base = make_spec(f, 2, 3, 0.5);
    base.hamming_radius = 3;
    const param_bounds r = lambda_range(base);
    REQUIRE(r.lo < r.hi);
    for (const double frac : {0.02, 0.3, 0.9}) {
      const double target = r.lo + frac * (std::min(r.hi, 1e4) - r.lo);
      if (!(target > 0)) continue;
      const ensemble_spec solved = spec_for_lambda(base, target);
      CHECK(lambda_closed_form(solved) ==
            doctest::Approx(target).epsilon(1e-7));
    }
  }
}

TEST_CASE("SE search ray preserves the width ratio") {
  ensemble_spec se = make_spec(family::SE, 2, 3, 0.5);
  se.hamming_radius = 2;
  se.w = 1.0;
  se.w_s = 0.5;
  const ensemble_spec solved = spec_for_lambda(se, 3.0);
  CHECK(solved.w_s / solved.w == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(lambda_closed_form(solved) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("unattainable targets report the attainable interval") {
  ensemble_spec be = make_spec(family::BE, 1, 1, 1.0);
  CHECK_THROWS_AS(mu_for_lambda(be, 1e300), domain_error);
  CHECK_THROWS_AS(mu_for_lambda(be, -1.0), domain_error);
}

TEST_CASE("spec validation rejects bad sizes and parameters") {
  ensemble_spec s = make_spec(family::BE, 0, 2, 1.0);
  CHECK_THROWS_AS(variance_profile(s), domain_error);
  s = make_spec(family::BE, 2, 2, -1.0);
  CHECK_THROWS_AS(variance_profile(s), domain_error);
  s = make_spec(family::PE, 2, 2, 1.0);
  s.mu = 0.0;
  CHECK_THROWS_AS(variance_profile(s), domain_error);
}
