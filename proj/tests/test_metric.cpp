#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "nlwave/metric.hpp"

using namespace nlwave;

namespace {

MetricSpec bump_spec(double a = 0.01, double a2 = 0.003, double omega = 1.3,
                     double R = 2.0) {
  MetricSpec s;
  s.family = MetricFamily::oscillating_bump;
  s.amplitude = a;
  s.shift_amplitude = a2;
  s.omega = omega;
  s.phase = {0.3, 1.1, 2.0};
  s.R = R;
  return s;
}

struct EventRng {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  explicit EventRng(std::uint64_t seed) : rng(seed) {}
  double t() { return 10.0 * unit(rng) - 5.0; }
  Vec3 inside(double R2) {
    Vec3 x;
    do {
      x = {R2 * (2 * unit(rng) - 1), R2 * (2 * unit(rng) - 1),
           R2 * (2 * unit(rng) - 1)};
    } while (norm3(x) >= R2 * 0.999);
    return x;
  }
  Vec3 outside(double R2) {
    Vec3 x = inside(R2);
    const double r = norm3(x);
    const double scale = (R2 + 3.0 * unit(rng)) / std::max(r, 1e-6);
    return {x[0] * scale, x[1] * scale, x[2] * scale};
  }
};

}  // namespace

TEST_CASE("zero amplitude is exactly Minkowski") {
  MetricSpec s = bump_spec(0.0, 0.0);
  const MetricSample m = eval_metric(s, 0.7, {0.1, 0.2, 0.3});
  CHECK(m.g[0][0] == -1.0);
  CHECK(m.g[1][1] == 1.0);
  CHECK(m.det_G == -1.0);
  for (int b = 0; b < 4; ++b) CHECK(m.b[b] == 0.0);
}

TEST_CASE("support exactness: bit-identical Minkowski outside the cylinder") {
  const MetricSpec s = bump_spec(0.05, 0.02, 2.0);
  EventRng er(42);
  const Mat4 mink = minkowski();
  for (int trial = 0; trial < 10000; ++trial) {
    const Vec3 x = er.outside(s.support_radius());
    const MetricSample m = eval_metric(s, er.t(), x);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        CHECK(m.g[a][b] == mink[a][b]);
        CHECK(m.g_inv[a][b] == mink[a][b]);
      }
    CHECK(m.det_G == -1.0);
    for (int c = 0; c < 4; ++c) {
      CHECK(m.b[c] == 0.0);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(m.dg[c][a][b] == 0.0);
    }
  }
}

TEST_CASE("pointwise family value at the origin") {
  // h_00 = a B(0) cos(0) = a, so g_00 = -1 + a.
  MetricSpec s = bump_spec(0.01, 0.0, 1.0);
  s.phase = {0.0, 0.0, 0.0};
  const MetricSample m = eval_metric(s, 0.0, {0.0, 0.0, 0.0});
  CHECK(m.g[0][0] == doctest::Approx(-0.99).epsilon(1e-14));
}

TEST_CASE("inverse consistency over random admissible events") {
  const MetricSpec s = bump_spec(0.08, 0.03, 1.7);
  EventRng er(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const Vec3 x = (trial % 2 == 0) ? er.inside(s.support_radius())
                                    : er.outside(s.support_radius());
    const MetricSample m = eval_metric(s, er.t(), x);
    const Mat4 prod = mat4_mul(m.g, m.g_inv);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        CHECK(std::abs(prod[a][b] - (a == b ? 1.0 : 0.0)) < 1e-12);
  }
}

TEST_CASE("analytic first derivatives match central differences") {
  const MetricSpec s = bump_spec(0.05, 0.02, 1.9);
  EventRng er(11);
  const double step = 1e-4;
  for (int trial = 0; trial < 200; ++trial) {
    const double t = er.t();
    const Vec3 x = er.inside(0.95 * s.support_radius());
    const MetricSample m = eval_metric(s, t, x);
    for (int c = 0; c < 4; ++c) {
      Vec3 xp = x, xm = x;
      double tp = t, tm = t;
      if (c == 0) {
        tp += step;
        tm -= step;
      } else {
        xp[c - 1] += step;
        xm[c - 1] -= step;
      }
      const MetricSample mp = eval_metric(s, tp, xp);
      const MetricSample mm = eval_metric(s, tm, xm);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double fd = (mp.g[a][b] - mm.g[a][b]) / (2.0 * step);
          const double scale = std::max(1e-8, std::abs(m.dg[c][a][b]));
          if (std::abs(fd) < 1e-10 && std::abs(m.dg[c][a][b]) < 1e-10)
            continue;
          CHECK(std::abs(m.dg[c][a][b] - fd) / scale < 1e-6);
        }
    }
  }
}

TEST_CASE("b vector matches finite differences of g_inv and det") {
  // b^beta = (1/sqrt(-G)) d_a (g^{a beta} sqrt(-G)) assembled from
  // finite differences of the inverse metric and the determinant.
  const MetricSpec s = bump_spec(0.05, 0.02, 1.1);
  EventRng er(13);
  const double step = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const double t = er.t();
    const Vec3 x = er.inside(0.9 * s.support_radius());
    const MetricSample m = eval_metric(s, t, x);
    const double sq = std::sqrt(-m.det_G);
    for (int beta = 0; beta < 4; ++beta) {
      double acc = 0.0;
      for (int a = 0; a < 4; ++a) {
        double tp = t, tm = t;
        Vec3 xp = x, xm = x;
        if (a == 0) {
          tp += step;
          tm -= step;
        } else {
          xp[a - 1] += step;
          xm[a - 1] -= step;
        }
        const MetricSample mp = eval_metric(s, tp, xp);
        const MetricSample mm = eval_metric(s, tm, xm);
        const double fp = mp.g_inv[a][beta] * std::sqrt(-mp.det_G);
        const double fm = mm.g_inv[a][beta] * std::sqrt(-mm.det_G);
        acc += (fp - fm) / (2.0 * step);
      }
      const double oracle = acc / sq;
      const double scale = std::max(1e-6, std::abs(oracle));
      CHECK(std::abs(m.b[beta] - oracle) / scale < 1e-5);
    }
  }
}

TEST_CASE("analytic time derivatives of the sample quantities") {
  const MetricSpec s = bump_spec(0.04, 0.015, 2.2);
  EventRng er(17);
  const double step = 1e-5;
  for (int trial = 0; trial < 60; ++trial) {
    const double t = er.t();
    const Vec3 x = er.inside(0.9 * s.support_radius());
    const MetricTimeDerivs td = eval_metric_time_derivs(s, t, x);
    const MetricSample mp = eval_metric(s, t + step, x);
    const MetricSample mm = eval_metric(s, t - step, x);
    for (int c = 0; c < 4; ++c)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double fd = (mp.dg[c][a][b] - mm.dg[c][a][b]) / (2.0 * step);
          CHECK(std::abs(td.dt_dg[c][a][b] - fd) <
                1e-5 * std::max(1.0, std::abs(fd)));
        }
    for (int a = 0; a < 4; ++a) {
      const double fdb = (mp.b[a] - mm.b[a]) / (2.0 * step);
      CHECK(std::abs(td.dt_b[a] - fdb) < 1e-4 * std::max(1.0, std::abs(fdb)));
      for (int b = 0; b < 4; ++b) {
        const double fdi = (mp.g_inv[a][b] - mm.g_inv[a][b]) / (2.0 * step);
        CHECK(std::abs(td.dt_g_inv[a][b] - fdi) <
              1e-5 * std::max(1.0, std::abs(fdi)));
      }
    }
  }
}

TEST_CASE("hyperbolicity checks") {
  SUBCASE("minkowski passes at lambda = 1") {
    MetricSpec s;
    const HypothesisReport rep = check_A1(s, 1.0, {9, 4});
    CHECK(rep.passed_A1);
    CHECK(rep.lambda == doctest::Approx(1.0));
    CHECK(rep.H == 0.0);
    CHECK(rep.lambda1 == doctest::Approx(1.0));
  }
  SUBCASE("small bump passes at lambda = 0.9") {
    const HypothesisReport rep = check_A1(bump_spec(0.01, 0.0), 0.9, {17, 16});
    CHECK(rep.passed_A1);
    CHECK(rep.lambda > 0.9);
  }
  SUBCASE("amplitude 2 fails at lambda = 0.5: g_00 crosses zero") {
    MetricSpec s = bump_spec(2.0, 0.0, 1.0);
    s.phase = {0.0, 0.0, 0.0};
    // Direct oracle at the lattice extreme: g_00(0, 0) = -1 + 2 = +1.
    bool saw_violation = false;
    try {
      const MetricSample m = eval_metric(s, 0.0, {0.0, 0.0, 0.0});
      saw_violation = m.g[0][0] > -0.5;
    } catch (const HyperbolicityError&) {
      saw_violation = true;
    }
    CHECK(saw_violation);
    const HypothesisReport rep = check_A1(s, 0.5, {9, 8});
    CHECK_FALSE(rep.passed_A1);
  }
  SUBCASE("lambda outside (0,1] is rejected") {
    CHECK_THROWS_AS(check_A1(MetricSpec{}, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(check_A1(MetricSpec{}, 0.0), std::invalid_argument);
  }
}

TEST_CASE("C1 norm estimates") {
  SUBCASE("flat family has H = 0") { CHECK(c1_norm_H(bump_spec(0, 0)) == 0.0); }
  SUBCASE("direct perturbation scales linearly in the amplitude") {
    MetricSpec s1 = bump_spec(0.01, 0.0, 1.2);
    MetricSpec s2 = bump_spec(0.02, 0.0, 1.2);
    const LatticeSpec lat{17, 8};
    // Oracle: h_ab and dh_ab are linear in a, so the full estimate (which
    // also includes the inverse-side terms) doubles to within 10%.
    const double H1 = c1_norm_H(s1, lat), H2 = c1_norm_H(s2, lat);
    CHECK(std::abs(H2 / H1 - 2.0) < 0.2);
  }
  SUBCASE("static bump attains |h_00| = a at the origin") {
    MetricSpec s = bump_spec(0.01, 0.0, 0.0);
    s.phase = {0.0, 0.0, 0.0};
    const double H = c1_norm_H(s, {17, 1});
    CHECK(H >= 0.01 - 1e-14);
  }
}

TEST_CASE("ellipticity bound values") {
  CHECK(ellipticity_bounds(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(ellipticity_bounds(0.9, 0.1) == doctest::Approx(0.7147).epsilon(1e-3));
  CHECK(ellipticity_bounds(0.5, 0.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(ellipticity_bounds(0.0, 0.1), std::invalid_argument);
}

TEST_CASE("spectral check") {
  MetricSpec flat;
  const MetricSample m = eval_metric(flat, 0.0, {0.3, 0.0, 0.0});
  CHECK(spectral_check(m, 1.0));
  CHECK_FALSE(spectral_check(m, 1.1));
}

TEST_CASE("spectral bounds follow from the hyperbolicity level") {
  // 1000 random samples of a family passing the check at lambda: the
  // derived lambda1 must bracket -g^00 and the spatial eigenvalues.
  const MetricSpec s = bump_spec(0.01, 0.004, 1.6);
  const double lambda = 0.9;
  const HypothesisReport rep = check_A1(s, lambda, {17, 16});
  REQUIRE(rep.passed_A1);
  const double lambda1 = ellipticity_bounds(lambda, rep.H);
  EventRng er(23);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 x = er.inside(s.support_radius());
    const MetricSample m = eval_metric(s, er.t(), x);
    if (!spectral_check(m, lambda1)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("smallness margin") {
  CHECK(smallness_margin(0.0, 2.0, 0.5) == 0.0);
  const double R = 2.0, alpha = 0.5;
  const double H = alpha / (700.0 * std::pow(1.0 + 0.5 * R, alpha + 1.0));
  CHECK(smallness_margin(H, R, alpha) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(smallness_margin(1e-4, 2.0, 0.5) ==
        doctest::Approx(0.396).epsilon(2e-3));
  CHECK_THROWS_AS(smallness_margin(0.1, 2.0, 1.5), std::invalid_argument);
}
