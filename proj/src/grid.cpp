#include "nlwave/grid.hpp"

#include <algorithm>
#include <cmath>

#include "nlwave/bump.hpp"

namespace nlwave {

Grid::Grid(int n_, double h_) : n(n_), h(h_) {
  if (n < 9 || n % 2 == 0)
    throw std::invalid_argument("Grid: n must be odd and >= 9");
  if (!(h > 0.0)) throw std::invalid_argument("Grid: spacing must be positive");
}

FieldState make_initial_data(const Grid& grid, double epsilon, Profile p,
                             double R, double sigma) {
  if (!(R > 0.0)) throw std::invalid_argument("make_initial_data: R <= 0");
  if (p == Profile::gaussian_bump) {
    if (sigma <= 0.0) sigma = R / 8.0;
    if (sigma > R / 8.0 + 1e-15)
      throw std::invalid_argument(
          "make_initial_data: gaussian sigma must be <= R/8 so the profile "
          "is negligible at |x| = R");
  }
  FieldState st(grid);
  st.t = 0.0;
  for (int k = 0; k < grid.n; ++k)
    for (int j = 0; j < grid.n; ++j)
      for (int i = 0; i < grid.n; ++i) {
        const Vec3 x = grid.coord(i, j, k);
        const double r = norm3(x);
        double v = 0.0;
        if (p == Profile::compact_bump) {
          v = bump(r / R);
        } else {
          v = (r >= R) ? 0.0 : std::exp(-(r * r) / (sigma * sigma));
        }
        st.phi[grid.idx(i, j, k)] = epsilon * v;
      }
  return st;
}

namespace {

inline double d1(const std::vector<double>& u, std::size_t c, std::ptrdiff_t s,
                 int pos, int n, double h) {
  // pos: node index along the axis; centered inside, one-sided 2nd order at
  // the two boundary shells.
  if (pos >= 2 && pos <= n - 3)
    return (u[c + s] - u[c - s]) / (2.0 * h);
  if (pos <= 1)
    return (-3.0 * u[c] + 4.0 * u[c + s] - u[c + 2 * s]) / (2.0 * h);
  return (3.0 * u[c] - 4.0 * u[c - s] + u[c - 2 * s]) / (2.0 * h);
}

inline double d2(const std::vector<double>& u, std::size_t c, std::ptrdiff_t s,
                 int pos, int n, double h) {
  if (pos >= 2 && pos <= n - 3)
    return (u[c + s] - 2.0 * u[c] + u[c - s]) / (h * h);
  if (pos <= 1)
    return (2.0 * u[c] - 5.0 * u[c + s] + 4.0 * u[c + 2 * s] -
            u[c + 3 * s]) /
           (h * h);
  return (2.0 * u[c] - 5.0 * u[c - s] + 4.0 * u[c - 2 * s] - u[c - 3 * s]) /
         (h * h);
}

}  // namespace

std::vector<double> derivative(const std::vector<double>& u, const Grid& g,
                               int axis) {
  const int n = g.n;
  const std::ptrdiff_t stride[3] = {1, n, static_cast<std::ptrdiff_t>(n) * n};
  std::vector<double> out(g.size());
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t c = g.idx(i, j, k);
        const int pos = axis == 0 ? i : (axis == 1 ? j : k);
        out[c] = d1(u, c, stride[axis], pos, n, g.h);
      }
  return out;
}

GradientField spatial_gradient(const std::vector<double>& u, const Grid& g) {
  GradientField gf;
  gf.x = derivative(u, g, 0);
  gf.y = derivative(u, g, 1);
  gf.z = derivative(u, g, 2);
  return gf;
}

std::vector<double> second_derivative(const std::vector<double>& u,
                                      const Grid& g, int a, int b) {
  if (a == b) {
    const int n = g.n;
    const std::ptrdiff_t stride[3] = {1, n,
                                      static_cast<std::ptrdiff_t>(n) * n};
    std::vector<double> out(g.size());
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const std::size_t c = g.idx(i, j, k);
          const int pos = a == 0 ? i : (a == 1 ? j : k);
          out[c] = d2(u, c, stride[a], pos, n, g.h);
        }
    return out;
  }
  // Mixed derivative: apply the two centered first-derivative stencils.
  return derivative(derivative(u, g, a), g, b);
}

std::vector<double> apply_omega(const std::vector<double>& u, const Grid& g,
                                int a, int b) {
  if (a == b || a < 0 || b < 0 || a > 2 || b > 2)
    throw std::invalid_argument("apply_omega: need a distinct axis pair");
  std::vector<double> da = derivative(u, g, a);
  std::vector<double> db = derivative(u, g, b);
  std::vector<double> out(g.size());
  const int n = g.n;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t c = g.idx(i, j, k);
        const Vec3 x = g.coord(i, j, k);
        out[c] = x[a] * db[c] - x[b] * da[c];
      }
  return out;
}

double trilinear(const std::vector<double>& u, const Grid& g, const Vec3& x) {
  const int n = g.n;
  double f[3];
  int i0[3];
  for (int a = 0; a < 3; ++a) {
    const double s = x[a] / g.h + 0.5 * (n - 1);
    if (s < 0.0 || s > n - 1)
      throw std::out_of_range("trilinear: point outside grid");
    int i = static_cast<int>(std::floor(s));
    if (i > n - 2) i = n - 2;
    i0[a] = i;
    f[a] = s - i;
  }
  double acc = 0.0;
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        const double w = (di ? f[0] : 1.0 - f[0]) * (dj ? f[1] : 1.0 - f[1]) *
                         (dk ? f[2] : 1.0 - f[2]);
        acc += w * u[g.idx(i0[0] + di, i0[1] + dj, i0[2] + dk)];
      }
  return acc;
}

std::vector<double> interpolate_to_sphere(const std::vector<double>& u,
                                          const Grid& g, double r,
                                          const SphereSampling& s) {
  if (r < 0.0 || r + g.h > g.R_dom())
    throw std::out_of_range("interpolate_to_sphere: sphere outside grid");
  std::vector<double> out(s.node.size());
  for (std::size_t q = 0; q < s.node.size(); ++q) {
    const Vec3 p = {r * s.node[q][0], r * s.node[q][1], r * s.node[q][2]};
    out[q] = trilinear(u, g, p);
  }
  return out;
}

double total_energy(const FieldState& st, const Grid& g) {
  const int n = g.n;
  const double h3 = g.h * g.h * g.h;
  const double inv_h2 = 1.0 / (g.h * g.h);
  double kin = 0.0, grad = 0.0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t c = g.idx(i, j, k);
        const double p = st.pi[c];
        kin += p * p;
        const double phi = st.phi[c];
        if (i + 1 < n) {
          const double d = st.phi[c + 1] - phi;
          grad += d * d * inv_h2;
        }
        if (j + 1 < n) {
          const double d = st.phi[c + n] - phi;
          grad += d * d * inv_h2;
        }
        if (k + 1 < n) {
          const double d = st.phi[c + static_cast<std::size_t>(n) * n] - phi;
          grad += d * d * inv_h2;
        }
      }
  return (kin + grad) * h3;
}

double max_abs(const std::vector<double>& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const std::vector<double>& u) {
  for (double v : u)
    if (!std::isfinite(v)) return false;
  return true;
}

double max_abs_in_ball(const std::vector<double>& u, const Grid& g, double R) {
  double m = 0.0;
  const double R2 = (R + 1e-12) * (R + 1e-12);
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        const Vec3 x = g.coord(i, j, k);
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= R2)
          m = std::max(m, std::abs(u[g.idx(i, j, k)]));
      }
  return m;
}

double max_weighted_outside(const std::vector<double>& u, const Grid& g,
                            double R) {
  double m = 0.0;
  for (int k = 0; k < g.n; ++k)
    for (int j = 0; j < g.n; ++j)
      for (int i = 0; i < g.n; ++i) {
        const Vec3 x = g.coord(i, j, k);
        const double r = norm3(x);
        if (r > R) m = std::max(m, (1.0 + r) * std::abs(u[g.idx(i, j, k)]));
      }
  return m;
}

double shell_band_quadrature(const Grid& g, const SphereSampling& s,
                             double r_lo, double r_hi,
                             const std::function<double(const Vec3&, double)>& f) {
  if (r_hi <= r_lo) return 0.0;
  const double dr_target = 0.5 * g.h;
  const int m = std::max(2, static_cast<int>(std::ceil((r_hi - r_lo) / dr_target)) + 1);
  const double dr = (r_hi - r_lo) / (m - 1);
  double acc = 0.0;
  for (int q = 0; q < m; ++q) {
    const double r = r_lo + q * dr;
    double shell = 0.0;
    for (std::size_t a = 0; a < s.node.size(); ++a) {
      const Vec3 p = {r * s.node[a][0], r * s.node[a][1], r * s.node[a][2]};
      shell += s.w[a] * f(p, r);
    }
    const double wq = (q == 0 || q == m - 1) ? 0.5 : 1.0;
    acc += wq * dr * r * r * shell;
  }
  return acc;
}

double ball_quadrature(const Grid& g, const SphereSampling& s, double R,
                       const std::function<double(const Vec3&, double)>& f) {
  return shell_band_quadrature(g, s, 0.0, R, f);
}

}  // namespace nlwave
