#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "nlwave/nullform.hpp"

using namespace nlwave;

namespace {

Mat4 mink_form() {
  Mat4 A{};
  A[0][0] = 1.0;
  A[1][1] = -1.0;
  A[2][2] = -1.0;
  A[3][3] = -1.0;
  return A;
}

}  // namespace

TEST_CASE("null certification: canonical cases") {
  SUBCASE("the Minkowski form is null with c = 1") {
    const NullCertificate c = validate_null_condition(mink_form());
    CHECK(c.is_null);
    CHECK(c.c == doctest::Approx(1.0));
    CHECK(c.sym_residual <= 1e-12);
  }
  SUBCASE("A^00-only (F = phi_t^2) is rejected") {
    Mat4 A{};
    A[0][0] = 1.0;
    const NullCertificate c = validate_null_condition(A);
    CHECK_FALSE(c.is_null);
    // Algebraic oracle: xi = (1,1,0,0) is null and the form gives 1.
    const Vec4 xi = {1.0, 1.0, 0.0, 0.0};
    double q = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) q += A[a][b] * xi[a] * xi[b];
    CHECK(q == doctest::Approx(1.0));
  }
  SUBCASE("antisymmetric matrices are null with c = 0") {
    Mat4 A{};
    A[0][1] = 1.0;
    A[1][0] = -1.0;
    const NullCertificate c = validate_null_condition(A);
    CHECK(c.is_null);
    CHECK(c.c == 0.0);
  }
}

TEST_CASE("certificate soundness sweep") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss;
  int accepted = 0, rejected = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Null by construction: c * diag(1,-1,-1,-1) + antisymmetric.
    const double c = gauss(rng);
    Mat4 A = {};
    A[0][0] = c;
    A[1][1] = -c;
    A[2][2] = -c;
    A[3][3] = -c;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        const double v = gauss(rng);
        A[a][b] += v;
        A[b][a] -= v;
      }
    if (validate_null_condition(A).is_null) ++accepted;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    // Perturb the symmetric part off the cone by at least 1e-6.
    Mat4 A = mink_form();
    std::uniform_int_distribution<int> pick(0, 3);
    int a = pick(rng), b = pick(rng);
    double mag = 0.0;
    while (std::abs(mag) < 1e-6) mag = 0.1 * gauss(rng);
    if (a == 0 && b == 0) mag += 0.0;  // diagonal shifts break the ratio too
    A[a][b] += mag;
    A[b][a] += mag;
    // A symmetric perturbation proportional to the form itself stays null;
    // exclude that measure-zero case by construction: adding 2*mag to a
    // single symmetric slot never preserves proportionality unless it is
    // compensated, which this construction never does.
    if (!validate_null_condition(A).is_null) ++rejected;
  }
  CHECK(accepted == 1000);
  CHECK(rejected == 1000);
}

TEST_CASE("random null covector cross-check agrees with the algebra") {
  std::mt19937_64 rng(123);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 200; ++trial) {
    Mat4 A;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) A[a][b] = gauss(rng);
    const NullCertificate cert = validate_null_condition(A);
    // Direct evaluation on 50 random null covectors.
    double worst = 0.0;
    for (int q = 0; q < 50; ++q) {
      Vec3 v = {gauss(rng), gauss(rng), gauss(rng)};
      const double nn = std::max(1e-12, norm3(v));
      const Vec4 xi = {1.0, v[0] / nn, v[1] / nn, v[2] / nn};
      double val = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) val += A[a][b] * xi[a] * xi[b];
      worst = std::max(worst, std::abs(val));
    }
    if (cert.is_null) CHECK(worst < 1e-10);
    if (worst > 1e-6) CHECK_FALSE(cert.is_null);
  }
}

TEST_CASE("nonlinearity evaluation") {
  const Grid g(17, 0.25);
  NullFormSpec spec;
  spec.enabled = true;
  spec.A = mink_form();

  SUBCASE("zero derivatives give zero") {
    std::vector<double> z(g.size(), 0.0);
    GradientField gr{z, z, z};
    const auto F = eval_F(spec, z, gr, z);
    CHECK(max_abs(F) == 0.0);
  }
  SUBCASE("constant pi gives the diagonal value") {
    std::vector<double> pi(g.size(), 2.0), z(g.size(), 0.0);
    GradientField gr{z, z, z};
    const auto F = eval_F(spec, pi, gr, z);
    for (double v : F) CHECK(v == doctest::Approx(4.0));
  }
  SUBCASE("antisymmetric form cancels pointwise") {
    NullFormSpec anti;
    anti.enabled = true;
    anti.A[0][2] = 1.5;
    anti.A[2][0] = -1.5;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    std::vector<double> pi(g.size()), phi(g.size());
    GradientField gr;
    gr.x.resize(g.size());
    gr.y.resize(g.size());
    gr.z.resize(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
      pi[c] = gauss(rng);
      phi[c] = gauss(rng);
      gr.x[c] = gauss(rng);
      gr.y[c] = gauss(rng);
      gr.z[c] = gauss(rng);
    }
    const auto F = eval_F(anti, pi, gr, phi);
    CHECK(max_abs(F) < 1e-12);
  }
  SUBCASE("bilinearity: cross term of a sum") {
    // F(u+v) - F(u) - F(v) = A(du, dv) + A(dv, du) for kappa = 0.
    std::mt19937_64 rng(6);
    std::normal_distribution<double> gauss;
    const double du[4] = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    const double dv[4] = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    auto quad = [&](const double* a, const double* b) {
      double acc = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += spec.A[i][j] * a[i] * b[j];
      return acc;
    };
    double sum[4];
    for (int i = 0; i < 4; ++i) sum[i] = du[i] + dv[i];
    const double lhs = quad(sum, sum) - quad(du, du) - quad(dv, dv);
    const double rhs = quad(du, dv) + quad(dv, du);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
  SUBCASE("shape mismatch is rejected") {
    std::vector<double> z(g.size(), 0.0), bad(g.size() - 1, 0.0);
    GradientField gr{z, z, z};
    CHECK_THROWS_AS(eval_F(spec, bad, gr, z), std::invalid_argument);
  }
}

TEST_CASE("weighted-product identity") {
  const double R = 2.0;

  SUBCASE("zero fields give zero residual") {
    const Grid g(33, 0.2);
    FieldState a(g), b(g);
    const SphereSampling s = SphereSampling::product_gauss(8, 16);
    CHECK(verify_psi_identity(a, b, g, mink_form(), 1.2 * R, R, s) == 0.0);
  }

  SUBCASE("radius below R is rejected") {
    const Grid g(33, 0.2);
    FieldState a(g), b(g);
    const SphereSampling s = SphereSampling::product_gauss(8, 16);
    CHECK_THROWS_AS(verify_psi_identity(a, b, g, mink_form(), 0.5 * R, R, s),
                    std::invalid_argument);
  }

  SUBCASE("analytic radial samples satisfy the identity to roundoff") {
    // phi1 = phi2 = f(r) static, sampled analytically: the identity
    // reduces to one-dimensional calculus and must hold to ~1e-13.
    auto f = [](double r) { return std::exp(-(r - 2.5) * (r - 2.5)); };
    auto fp = [](double r) {
      return -2.0 * (r - 2.5) * std::exp(-(r - 2.5) * (r - 2.5));
    };
    const SphereSampling s = SphereSampling::product_gauss(6, 12);
    double worst = 0.0;
    for (double r : {2.0, 2.5, 3.1}) {
      for (int q = 0; q < s.count(); ++q) {
        const Vec3& w = s.node[q];
        PointSample ps;
        ps.phi = f(r);
        ps.pi = 0.0;
        ps.grad = {fp(r) * w[0], fp(r) * w[1], fp(r) * w[2]};
        worst = std::max(worst, std::abs(psi_identity_residual_at(
                                    mink_form(), ps, ps, r, w)));
      }
    }
    CHECK(worst < 1e-8);
  }

  SUBCASE("grid residual drops by about 4x under refinement") {
    auto residual_at = [&](int n) {
      const Grid g(n, 8.0 / (n - 1));
      FieldState a(g), b(g);
      for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
          for (int i = 0; i < g.n; ++i) {
            const Vec3 x = g.coord(i, j, k);
            const std::size_t c = g.idx(i, j, k);
            a.phi[c] = std::sin(x[0]) * std::exp(-0.1 * x[1] * x[1]);
            a.pi[c] = std::cos(0.5 * x[2]);
            b.phi[c] = std::cos(x[1]) + 0.2 * x[0];
            b.pi[c] = std::sin(0.3 * (x[0] + x[2]));
          }
      const SphereSampling s = SphereSampling::product_gauss(10, 20);
      Mat4 A = mink_form();
      A[0][1] += 0.7;  // antisymmetric extension keeps the form null
      A[1][0] -= 0.7;
      return verify_psi_identity(a, b, g, A, 2.8, R, s);
    };
    const double e1 = residual_at(41), e2 = residual_at(81);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.5);
  }
}
