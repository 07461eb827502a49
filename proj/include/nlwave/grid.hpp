#ifndef NLWAVE_GRID_HPP
#define NLWAVE_GRID_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nlwave/sphere.hpp"
#include "nlwave/types.hpp"

namespace nlwave {

// Uniform origin-centered Cartesian grid, n points per axis (n odd so the
// origin is a node). Flat storage is row-major with i (the x index) fastest.
struct Grid {
  int n = 0;
  double h = 0.0;

  Grid() = default;
  Grid(int n_, double h_);

  double R_dom() const { return 0.5 * h * (n - 1); }
  std::size_t size() const {
    return static_cast<std::size_t>(n) * n * n;
  }
  std::size_t idx(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * n + j) * n + i;
  }
  double coord1(int i) const { return (i - (n - 1) / 2) * h; }
  Vec3 coord(int i, int j, int k) const {
    return {coord1(i), coord1(j), coord1(k)};
  }
};

// Discrete (phi, pi = d_t phi) pair at one time level.
struct FieldState {
  double t = 0.0;
  std::vector<double> phi;
  std::vector<double> pi;

  FieldState() = default;
  explicit FieldState(const Grid& g)
      : phi(g.size(), 0.0), pi(g.size(), 0.0) {}
};

enum class Profile { gaussian_bump, compact_bump };

// Initial data phi = eps*phi0, pi = eps*phi1 with phi1 = 0 (time-symmetric).
// compact_bump: phi0 = B(|x|/R). gaussian_bump: phi0 = exp(-|x|^2/sigma^2)
// truncated at |x| = R; requires sigma <= R/8 so the truncation sits below
// 1e-14.
FieldState make_initial_data(const Grid& grid, double epsilon, Profile p,
                             double R, double sigma = -1.0);

struct GradientField {
  std::vector<double> x, y, z;
};

// Centered 2nd-order first derivatives; one-sided 2nd-order on the two
// boundary shells.
GradientField spatial_gradient(const std::vector<double>& u, const Grid& g);
std::vector<double> derivative(const std::vector<double>& u, const Grid& g,
                               int axis);
// d^2 u / dx_a dx_b, centered, one-sided fallback at the boundary shells.
std::vector<double> second_derivative(const std::vector<double>& u,
                                      const Grid& g, int a, int b);

// Omega_{ab} u = x_a d_b u - x_b d_a u for an axis pair from {01,02,12}
// (axes are 0-based spatial indices).
std::vector<double> apply_omega(const std::vector<double>& u, const Grid& g,
                                int a, int b);

// Trilinear interpolation. Throws std::out_of_range when x leaves the grid.
double trilinear(const std::vector<double>& u, const Grid& g, const Vec3& x);

// Samples u at the points r*omega of the sphere sampling. Requires
// r + h <= R_dom.
std::vector<double> interpolate_to_sphere(const std::vector<double>& u,
                                          const Grid& g, double r,
                                          const SphereSampling& s);

// Conserved discrete t-slice energy: sum(pi^2) h^3 plus the face-difference
// gradient energy (equal to -phi * Lap_h phi for fields vanishing on the
// boundary shells). Exactly conserved by the semi-discrete flat flow.
double total_energy(const FieldState& st, const Grid& g);

double max_abs(const std::vector<double>& u);
bool all_finite(const std::vector<double>& u);

// max |u| over nodes with |x| <= R (strictly: r <= R + 1e-12).
double max_abs_in_ball(const std::vector<double>& u, const Grid& g, double R);
// max (1+r)|u| over nodes with |x| > R.
double max_weighted_outside(const std::vector<double>& u, const Grid& g,
                            double R);

// Radial-shell quadrature of a pointwise integrand over the ball r <= R:
// int_0^R r^2 (int f domega) dr, composite trapezoid in r with spacing
// ~h/2, sphere quadrature per shell. f receives the evaluation point and r.
double ball_quadrature(const Grid& g, const SphereSampling& s, double R,
                       const std::function<double(const Vec3&, double)>& f);

// Trapezoid quadrature of f over shells r in [r_lo, r_hi] with weight r^2,
// i.e. int_{r_lo}^{r_hi} r^2 (int f domega) dr.
double shell_band_quadrature(const Grid& g, const SphereSampling& s,
                             double r_lo, double r_hi,
                             const std::function<double(const Vec3&, double)>& f);

}  // namespace nlwave

#endif
