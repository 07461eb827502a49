#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "nlwave/multiplier.hpp"
#include "nlwave/tensors.hpp"

using namespace nlwave;

TEST_CASE("multiplier profile bounds") {
  for (double alpha : {0.3, 0.5, 0.8}) {
    const double beta = 2.0 / alpha;
    const MultiplierProfile p = MultiplierProfile::make(alpha, 50.0, 4001);
    CHECK(p.f.front() == doctest::Approx(0.0));
    CHECK(std::abs(p.chi.front() - 2.0) < 1e-6);
    for (std::size_t i = 0; i < p.r.size(); ++i) {
      const double r = p.r[i];
      CHECK(p.f[i] >= -1e-14);
      CHECK(p.f[i] < beta);
      if (i > 0) CHECK(p.f[i] >= p.f[i - 1]);
      CHECK(std::abs(p.chi[i]) <= beta / (1.0 + r) + 1e-12);
      CHECK(std::abs(MultiplierProfile::chiprime_at(alpha, r)) <=
            beta / ((1.0 + r) * (1.0 + r)) + 1e-9);
      // chi - f'/2 >= (1+r)^(-alpha-1), with equality at r = 0.
      CHECK(p.chi[i] - 0.5 * p.fprime[i] >=
            std::pow(1.0 + r, -alpha - 1.0) - 1e-12);
      // The radial combination r^-1 f + f'/2 - chi collapses to the
      // weight (1+r)^(-alpha-1) identically (chi = f/r).
      CHECK(std::abs(0.5 * p.fprime[i] - std::pow(1.0 + r, -alpha - 1.0)) <
            1e-12);
    }
    CHECK(p.f.back() < beta);
    CHECK(p.f.back() > 0.9 * beta * (1.0 - std::pow(51.0, -alpha)));
  }
}

TEST_CASE("stress-energy tensor") {
  MetricSpec flat;
  const MetricSample m = eval_metric(flat, 0.0, {0.1, 0.0, 0.0});

  SUBCASE("zero gradient gives zero") {
    const Mat4 T = stress_energy({0, 0, 0, 0}, m);
    CHECK(max_abs_entry(T) == 0.0);
  }
  SUBCASE("pure time gradient on flat space") {
    // d^c phi d_c phi = -1, so T_00 = 1 - 1/2 = 1/2 and T_ii = 1/2.
    const Mat4 T = stress_energy({1, 0, 0, 0}, m);
    CHECK(T[0][0] == doctest::Approx(0.5));
    for (int i = 1; i < 4; ++i) {
      CHECK(T[i][i] == doctest::Approx(0.5));
      CHECK(T[0][i] == doctest::Approx(0.0));
    }
  }
  SUBCASE("symmetry on random inputs") {
    MetricSpec s;
    s.family = MetricFamily::oscillating_bump;
    s.amplitude = 0.05;
    s.shift_amplitude = 0.02;
    s.omega = 1.3;
    s.R = 2.0;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 50; ++trial) {
      const Vec3 x = {0.3 * gauss(rng), 0.3 * gauss(rng), 0.3 * gauss(rng)};
      const MetricSample mm = eval_metric(s, gauss(rng), x);
      const Vec4 d = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
      const Mat4 T = stress_energy(d, mm);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          CHECK(std::abs(T[a][b] - T[b][a]) < 1e-14);
    }
  }
}

TEST_CASE("currents") {
  const MultiplierProfile prof = MultiplierProfile::make(0.5, 20.0, 101);
  MetricSpec flat;
  const MetricSample m = eval_metric(flat, 0.0, {0.4, 0.2, 0.1});

  SUBCASE("flat metric: K^T vanishes") {
    const CurrentOutput c =
        currents(MultiplierField::T, {0.7, 0.3, -0.2, 0.5}, 0.4, m,
                 {0.4, 0.2, 0.1}, prof);
    CHECK(std::abs(c.K) < 1e-15);
  }
  SUBCASE("flat spacelike density is the classical energy density") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
      const Vec4 d = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
      const CurrentOutput c = currents(MultiplierField::T, d, 0.0, m,
                                       {0.4, 0.2, 0.1}, prof);
      const double expect =
          0.5 * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
      CHECK(c.spacelike_density == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("oscillating metric: |K^T| obeys the deformation bound") {
    MetricSpec s;
    s.family = MetricFamily::oscillating_bump;
    s.amplitude = 0.01;
    s.shift_amplitude = 0.004;
    s.omega = 1.6;
    s.R = 2.0;
    const double H = c1_norm_H(s, {17, 16});
    const double bound_coef =
        3.0 * H * std::pow(1.0 + H + 2.0 * H * H, 3.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10000; ++trial) {
      Vec3 x;
      do {
        x = {2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0,
             2.0 * unit(rng) - 1.0};
      } while (norm3(x) >= 1.0);
      const MetricSample mm = eval_metric(s, 6.0 * unit(rng), x);
      const Vec4 d = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
      const double d2 =
          d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
      const CurrentOutput c =
          currents(MultiplierField::T, d, gauss(rng), mm, x, prof);
      CHECK(std::abs(c.K) <= bound_coef * d2 * (1.0 + 1e-9));
    }
  }
  SUBCASE("radial multiplier bulk scalar is finite at the origin") {
    const CurrentOutput c = currents(MultiplierField::radial_f,
                                     {0.5, 0.1, 0.2, -0.3}, 0.2, m,
                                     {0.0, 0.0, 0.0}, prof);
    CHECK(std::isfinite(c.K));
    CHECK(std::isfinite(c.spacelike_density));
  }
}
