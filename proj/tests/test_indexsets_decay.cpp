#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nlwave/decay.hpp"
#include "nlwave/indexsets.hpp"

using namespace nlwave;

TEST_CASE("commutation index sets") {
  const CommutationIndex ix = index_sets();
  CHECK(ix.A.size() == 39);
  CHECK(ix.B.size() == 27);
  CHECK(ix.in_A(5, 3));
  CHECK(ix.in_A(5, 2));
  CHECK_FALSE(ix.in_B(5, 2));  // (5,4) is outside A
  CHECK(ix.in_B(5, 1));
  CHECK_FALSE(ix.in_A(6, 0));
  CHECK_FALSE(ix.in_A(0, 9));
  CHECK(verify_index_set_properties(ix));
}

TEST_CASE("index-set property violations are detectable") {
  // A deliberately broken membership test would fail property (1); here we
  // just confirm the checker exercises every split (bounded work).
  const CommutationIndex ix = index_sets();
  int splits = 0;
  for (int k1 = 0; k1 <= 8; ++k1)
    for (int j1 = 0; j1 <= 8; ++j1)
      for (int k2 = 0; k2 + k1 <= 8; ++k2)
        for (int j2 = 0; j2 + j1 <= 8; ++j2)
          if (ix.in_A(k1 + k2, j1 + j2)) ++splits;
  CHECK(splits > 100);
  CHECK(splits <= 45 * 81 * 4);
}

TEST_CASE("dyadic schedule") {
  SUBCASE("gamma = 2 up to 16") {
    const auto s = dyadic_schedule(2.0, 16.0);
    REQUIRE(s.size() == 4);
    CHECK(s[0] == doctest::Approx(2.0));
    CHECK(s[1] == doctest::Approx(4.0));
    CHECK(s[2] == doctest::Approx(8.0));
    CHECK(s[3] == doctest::Approx(16.0));
  }
  SUBCASE("gamma = 1.5 up to 10") {
    const auto s = dyadic_schedule(1.5, 10.0);
    const double expect[6] = {1.5, 2.25, 3.375, 5.0625, 7.59375, 10.0};
    REQUIRE(s.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(s[i] == doctest::Approx(expect[i]));
  }
  SUBCASE("consecutive-ratio invariant") {
    for (double gamma : {1.3, 2.0, 3.0}) {
      const auto s = dyadic_schedule(gamma, 40.0);
      for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(s[i - 1] >= s[i] / (gamma * gamma) - 1e-12);
        CHECK(s[i - 1] <= s[i] * gamma * gamma + 1e-12);
      }
    }
  }
  SUBCASE("bad gamma rejected") {
    CHECK_THROWS_AS(dyadic_schedule(1.1, 10.0), std::invalid_argument);
  }
}

TEST_CASE("power-law fits") {
  SUBCASE("exact log-linear data recovers the slope") {
    std::vector<double> tau, e;
    for (int i = 0; i < 9; ++i) {
      const double t = 2.0 + 4.0 * i;
      tau.push_back(t);
      e.push_back(std::pow(1.0 + t, -1.5));
    }
    const FitResult f = fit_power_law(tau, e);
    CHECK_FALSE(f.degenerate);
    CHECK(std::abs(f.slope + 1.5) < 1e-12);
    CHECK(f.residual < 1e-12);
  }
  SUBCASE("synthetic decay report passes at its target") {
    DecaySeries s;
    for (int i = 0; i < 10; ++i) {
      const double t = 4.0 + 4.0 * i;
      s.tau.push_back(t);
      s.E_total.push_back(3.0 * std::pow(1.0 + t, -1.5));
      s.E_interior.push_back(0.0);
      s.max_phi_inner.push_back(0.7 * std::pow(1.0 + t, -0.75));
      s.max_phi_outer_weighted.push_back(0.0);
      s.E_T.push_back(0.0);
      s.E_Omega.push_back(0.0);
    }
    const DecayReport rep = fit_decay(s, 0.5);
    CHECK(rep.enough_leaves);
    CHECK(rep.pass_energy);
    CHECK(rep.pass_pointwise);
    CHECK(std::abs(rep.energy.slope + 1.5) < 1e-9);
    CHECK(std::abs(rep.pointwise.slope + 0.75) < 1e-9);
  }
  SUBCASE("degenerate all-zero series is flagged") {
    DecaySeries s;
    for (int i = 0; i < 8; ++i) {
      s.tau.push_back(1.0 + i);
      s.E_total.push_back(0.0);
      s.E_interior.push_back(0.0);
      s.max_phi_inner.push_back(0.0);
      s.max_phi_outer_weighted.push_back(0.0);
      s.E_T.push_back(0.0);
      s.E_Omega.push_back(0.0);
    }
    const DecayReport rep = fit_decay(s, 0.5);
    CHECK(rep.energy.degenerate);
    CHECK_FALSE(rep.pass_energy);
  }
  SUBCASE("too-narrow windows do not count as enough leaves") {
    DecaySeries s;
    for (int i = 0; i < 8; ++i) {
      const double t = 10.0 + 0.1 * i;
      s.tau.push_back(t);
      s.E_total.push_back(std::pow(1.0 + t, -2.0));
      s.E_interior.push_back(0.0);
      s.max_phi_inner.push_back(std::pow(1.0 + t, -1.0));
      s.max_phi_outer_weighted.push_back(0.0);
      s.E_T.push_back(0.0);
      s.E_Omega.push_back(0.0);
    }
    const DecayReport rep = fit_decay(s, 0.5);
    CHECK_FALSE(rep.enough_leaves);
    CHECK_FALSE(rep.pass_energy);
  }
}
