#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "nlwave/bump.hpp"
#include "nlwave/checkpoint.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/sphere.hpp"

using namespace nlwave;

namespace {
const double kPi = std::acos(-1.0);

// Real spherical harmonics up to degree 4 via explicit polynomials.
double harmonic(int l, int m, const Vec3& w) {
  const double x = w[0], y = w[1], z = w[2];
  switch (l) {
    case 1: return m == 0 ? z : (m == 1 ? x : y);
    case 2:
      switch (m) {
        case 0: return 3 * z * z - 1;
        case 1: return x * z;
        case 2: return x * x - y * y;
        default: return x * y;
      }
    case 3:
      switch (m) {
        case 0: return z * (5 * z * z - 3);
        case 1: return x * (5 * z * z - 1);
        case 2: return z * (x * x - y * y);
        default: return x * (x * x - 3 * y * y);
      }
    case 4:
      switch (m) {
        case 0: return 35 * z * z * z * z - 30 * z * z + 3;
        case 1: return x * z * (7 * z * z - 3);
        case 2: return (x * x - y * y) * (7 * z * z - 1);
        default: return x * y * (x * x - y * y);
      }
    default: return 1.0;
  }
}
}  // namespace

TEST_CASE("sphere quadrature weights and harmonic exactness") {
  const SphereSampling s = SphereSampling::product_gauss(16, 32);
  double total = 0.0;
  for (double w : s.w) total += w;
  CHECK(std::abs(total - 4.0 * kPi) < 1e-12);

  for (int l = 1; l <= 4; ++l)
    for (int m = 0; m <= 3; ++m) {
      double acc = 0.0;
      for (int q = 0; q < s.count(); ++q)
        acc += s.w[q] * harmonic(l, m, s.node[q]);
      CHECK(std::abs(acc) < 1e-10);
    }
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  // int_-1^1 t^k dt for k = 0..15.
  for (int k = 0; k <= 15; ++k) {
    double acc = 0.0;
    for (int q = 0; q < 8; ++q) acc += w[q] * std::pow(x[q], k);
    const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
    CHECK(std::abs(acc - exact) < 1e-13);
  }
}

TEST_CASE("grid construction and coordinates") {
  const Grid g(33, 0.25);
  CHECK(g.R_dom() == doctest::Approx(4.0));
  const Vec3 c = g.coord(16, 16, 16);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 0.0);
  CHECK(g.coord(17, 16, 16)[0] == doctest::Approx(0.25));
  CHECK_THROWS_AS(Grid(32, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(Grid(33, -1.0), std::invalid_argument);
}

TEST_CASE("initial data profiles") {
  const Grid g(49, 0.1);
  const double R = 2.0;

  SUBCASE("epsilon zero is the zero state") {
    const FieldState st = make_initial_data(g, 0.0, Profile::compact_bump, R);
    CHECK(max_abs(st.phi) == 0.0);
    CHECK(max_abs(st.pi) == 0.0);
  }
  SUBCASE("compact bump vanishes exactly at radius R") {
    const FieldState st = make_initial_data(g, 1.0, Profile::compact_bump, R);
    for (int k = 0; k < g.n; ++k)
      for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
          if (norm3(g.coord(i, j, k)) >= R)
            CHECK(st.phi[g.idx(i, j, k)] == 0.0);
  }
  SUBCASE("gaussian peak is one at the origin") {
    const FieldState st =
        make_initial_data(g, 1.0, Profile::gaussian_bump, R, R / 8.0);
    CHECK(st.phi[g.idx(24, 24, 24)] == doctest::Approx(1.0));
    CHECK_THROWS_AS(
        make_initial_data(g, 1.0, Profile::gaussian_bump, R, R / 2.0),
        std::invalid_argument);
  }
}

TEST_CASE("stencils: exactness and measured order") {
  SUBCASE("constant and linear fields") {
    const Grid g(25, 0.2);
    std::vector<double> cst(g.size(), 3.0), lin(g.size());
    for (int k = 0; k < g.n; ++k)
      for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
          lin[g.idx(i, j, k)] = g.coord(i, j, k)[0];
    const GradientField gc = spatial_gradient(cst, g);
    CHECK(max_abs(gc.x) == 0.0);
    const auto hxx = second_derivative(cst, g, 0, 0);
    CHECK(max_abs(hxx) < 1e-12);
    const GradientField gl = spatial_gradient(lin, g);
    for (double v : gl.x) CHECK(std::abs(v - 1.0) < 1e-12);
    CHECK(max_abs(gl.y) < 1e-12);
  }

  SUBCASE("order >= 1.9 for first and second derivatives across three grids") {
    // Interior max-norm error against the analytic derivatives of
    // sin(x1) and exp(-|x|^2).
    auto measure = [&](int n, int which, int da, int db) {
      const Grid g(n, 2.0 / (n - 1));
      std::vector<double> u(g.size());
      for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
          for (int i = 0; i < g.n; ++i) {
            const Vec3 x = g.coord(i, j, k);
            u[g.idx(i, j, k)] =
                which == 0
                    ? std::sin(x[0])
                    : std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
          }
      std::vector<double> d;
      if (db < 0)
        d = derivative(u, g, da);
      else
        d = second_derivative(u, g, da, db);
      double err = 0.0;
      for (int k = 3; k < g.n - 3; ++k)
        for (int j = 3; j < g.n - 3; ++j)
          for (int i = 3; i < g.n - 3; ++i) {
            const Vec3 x = g.coord(i, j, k);
            double ex;
            if (which == 0) {
              if (db < 0)
                ex = da == 0 ? std::cos(x[0]) : 0.0;
              else
                ex = (da == 0 && db == 0) ? -std::sin(x[0]) : 0.0;
            } else {
              const double e = std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
              if (db < 0)
                ex = -2.0 * x[da] * e;
              else if (da == db)
                ex = (4.0 * x[da] * x[da] - 2.0) * e;
              else
                ex = 4.0 * x[da] * x[db] * e;
            }
            err = std::max(err, std::abs(d[g.idx(i, j, k)] - ex));
          }
      return err;
    };
    const int ns[3] = {17, 33, 65};
    for (int which = 0; which < 2; ++which) {
      const int stencils[4][2] = {{0, -1}, {1, -1}, {0, 0}, {0, 1}};
      for (auto [da, db] : stencils) {
        double e[3];
        for (int q = 0; q < 3; ++q) e[q] = measure(ns[q], which, da, db);
        if (e[0] < 1e-13) continue;  // identically-exact combination
        for (int q = 0; q < 2; ++q) {
          const double order = std::log2(e[q] / e[q + 1]);
          CHECK(order >= 1.9);
        }
      }
    }
  }
}

TEST_CASE("angular momentum stencils") {
  const Grid g(41, 0.1);
  std::vector<double> radial(g.size()), x1(g.size()), x1x2(g.size());
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        const Vec3 x = g.coord(i, j, k);
        radial[g.idx(i, j, k)] = std::exp(-norm3(x));
        x1[g.idx(i, j, k)] = x[0];
        x1x2[g.idx(i, j, k)] = x[0] * x[1];
      }

  SUBCASE("rotations annihilate radial functions to stencil accuracy") {
    const auto o = apply_omega(radial, g, 0, 1);
    double m = 0.0;
    for (int k = 3; k < g.n - 3; ++k)
      for (int j = 3; j < g.n - 3; ++j)
        for (int i = 3; i < g.n - 3; ++i)
          m = std::max(m, std::abs(o[g.idx(i, j, k)]));
    CHECK(m < 5e-3);  // O(h^2) for this profile
  }
  SUBCASE("Omega_12 x1 = -x2 to machine precision") {
    const auto o = apply_omega(x1, g, 0, 1);
    for (int k = 2; k < g.n - 2; ++k)
      for (int j = 2; j < g.n - 2; ++j)
        for (int i = 2; i < g.n - 2; ++i) {
          const Vec3 x = g.coord(i, j, k);
          CHECK(std::abs(o[g.idx(i, j, k)] + x[1]) < 1e-12);
        }
  }
  SUBCASE("Omega_12 (x1 x2) = x1^2 - x2^2 to machine precision") {
    // Oracle: d_2(x1 x2) = x1, d_1(x1 x2) = x2, so
    // x1 d_2 u - x2 d_1 u = x1^2 - x2^2, and the centered stencil is exact
    // on quadratics.
    const auto o = apply_omega(x1x2, g, 0, 1);
    for (int k = 2; k < g.n - 2; ++k)
      for (int j = 2; j < g.n - 2; ++j)
        for (int i = 2; i < g.n - 2; ++i) {
          const Vec3 x = g.coord(i, j, k);
          CHECK(std::abs(o[g.idx(i, j, k)] - (x[0] * x[0] - x[1] * x[1])) <
                1e-12);
        }
  }
  SUBCASE("repeated application is deterministic") {
    const auto a = apply_omega(apply_omega(x1x2, g, 0, 1), g, 0, 1);
    const auto b = apply_omega(apply_omega(x1x2, g, 0, 1), g, 0, 1);
    for (std::size_t c = 0; c < a.size(); ++c) CHECK(a[c] == b[c]);
  }
}

TEST_CASE("trilinear interpolation") {
  const Grid g(33, 0.25);
  std::vector<double> cst(g.size(), 3.0), aff(g.size()), sq(g.size());
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        const Vec3 x = g.coord(i, j, k);
        aff[g.idx(i, j, k)] = 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2];
        sq[g.idx(i, j, k)] = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      }
  const SphereSampling s = SphereSampling::product_gauss(8, 16);

  SUBCASE("constants and affine fields are exact") {
    for (double v : interpolate_to_sphere(cst, g, 1.0, s))
      CHECK(std::abs(v - 3.0) < 1e-12);
    const auto vals = interpolate_to_sphere(aff, g, 1.3, s);
    for (int q = 0; q < s.count(); ++q) {
      const Vec3& w = s.node[q];
      const double exact =
          1.0 + 2.0 * 1.3 * w[0] - 1.3 * w[1] + 0.5 * 1.3 * w[2];
      CHECK(std::abs(vals[q] - exact) < 1e-12);
    }
  }
  SUBCASE("|x|^2 converges at second order") {
    auto err_at = [&](int n) {
      const Grid gg(n, 8.0 / (n - 1));
      std::vector<double> u(gg.size());
      for (int k = 0; k < gg.n; ++k)
        for (int j = 0; j < gg.n; ++j)
          for (int i = 0; i < gg.n; ++i) {
            const Vec3 x = gg.coord(i, j, k);
            u[gg.idx(i, j, k)] = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
          }
      const auto vals = interpolate_to_sphere(u, gg, 1.0, s);
      double e = 0.0;
      for (double v : vals) e = std::max(e, std::abs(v - 1.0));
      return e;
    };
    const double e1 = err_at(33), e2 = err_at(65);
    CHECK(std::log2(e1 / e2) > 1.9);
  }
  SUBCASE("outside the grid raises") {
    CHECK_THROWS_AS(interpolate_to_sphere(cst, g, 4.2, s), std::out_of_range);
  }
}

TEST_CASE("ball quadrature against a radial oracle") {
  // int_{r<=1} (1+r)^2 dx = 4 pi (1/3 + 2/4 + 1/5).
  const Grid g(49, 0.1);
  const SphereSampling s = SphereSampling::product_gauss(16, 32);
  const double val = ball_quadrature(
      g, s, 1.0, [](const Vec3&, double r) { return (1.0 + r) * (1.0 + r); });
  const double oracle = 4.0 * kPi * (1.0 / 3.0 + 0.5 + 0.2);
  CHECK(val == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(oracle == doctest::Approx(12.99).epsilon(1e-3));
}

TEST_CASE("checkpoint round-trip is bit exact") {
  const Grid g(17, 0.5);
  FieldState st(g);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (auto& v : st.phi) v = gauss(rng);
  for (auto& v : st.pi) v = gauss(rng);
  st.t = 1.25;
  const std::string path = "checkpoint_test.nlwv";
  write_checkpoint(path, g, st);
  const Checkpoint cp = read_checkpoint(path);
  CHECK(cp.grid.n == g.n);
  CHECK(cp.grid.h == g.h);
  CHECK(cp.state.t == st.t);
  for (std::size_t c = 0; c < st.phi.size(); ++c) {
    CHECK(cp.state.phi[c] == st.phi[c]);
    CHECK(cp.state.pi[c] == st.pi[c]);
  }
  std::remove(path.c_str());
}
