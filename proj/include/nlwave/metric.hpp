#ifndef NLWAVE_METRIC_HPP
#define NLWAVE_METRIC_HPP

#include <stdexcept>
#include <string>

#include "nlwave/types.hpp"

namespace nlwave {

// The background fails to be uniformly hyperbolic (degenerate or
// wrong-signature metric).
struct HyperbolicityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MetricFamily { minkowski, oscillating_bump };

// Time-dependent metric g = m + h with h supported in |x| <= R/2:
//   h_00 = a  B(s) cos(w t)
//   h_ii = a  B(s) cos(w t + theta_i)
//   h_0i = a2 B(s) sin(w t) x_i/(R/2)
// with s = |x|/(R/2) and B the standard bump. The time dependence never
// settles: the family oscillates forever.
struct MetricSpec {
  MetricFamily family = MetricFamily::minkowski;
  double amplitude = 0.0;        // a
  double shift_amplitude = 0.0;  // a2
  double omega = 0.0;            // temporal frequency
  std::array<double, 3> phase{{0.0, 0.0, 0.0}};
  double R = 2.0;  // cylinder scale; h supported in |x| <= R/2

  double support_radius() const { return 0.5 * R; }
  bool is_flat() const {
    return family == MetricFamily::minkowski ||
           (amplitude == 0.0 && shift_amplitude == 0.0);
  }
};

// Pointwise metric data at an event: g, its inverse, det(g), the first
// derivatives dg[c][a][b] = d_c g_ab (c = 0 is time), and the first-order
// wave-operator coefficient b^beta = (1/sqrt(-G)) d_a (g^{ab} sqrt(-G)).
struct MetricSample {
  Mat4 g;
  Mat4 g_inv;
  double det_G = -1.0;
  double dg[4][4][4] = {};
  Vec4 b{{0.0, 0.0, 0.0, 0.0}};
};

// Analytic time derivatives of the sample quantities, used by the
// wave-operator commutator diagnostics: d_t of dg, of g^{ab}, and of b.
struct MetricTimeDerivs {
  double dt_dg[4][4][4] = {};  // d_t d_c g_ab
  Mat4 dt_g_inv = {};          // d_t g^{ab}
  Vec4 dt_b{{0.0, 0.0, 0.0, 0.0}};
};

struct LatticeSpec {
  int per_axis = 33;  // spatial samples per axis over the cylinder cube
  int temporal = 64;  // samples over one period of omega
};

// Structural-hypothesis report for a metric family. `lambda` is the largest
// level at which the uniform-hyperbolicity condition holds on the sample
// lattice; H estimates the C^1 norm of (h_ab, h^ab) on the same lattice.
struct HypothesisReport {
  double lambda = 0.0;
  double H = 0.0;
  double lambda1 = 0.0;
  double smallness_margin = 0.0;
  bool passed_A1 = false;
  double alpha = 0.5;
  LatticeSpec lattice;  // sampling density used for the estimates
};

MetricSample eval_metric(const MetricSpec& spec, double t, const Vec3& x);
MetricTimeDerivs eval_metric_time_derivs(const MetricSpec& spec, double t,
                                         const Vec3& x);

// Checks g_00 <= -lambda and lambda <= eig(g_ij) <= 1/lambda over a
// space-time lattice covering the cylinder and one temporal period.
// lambda must lie in (0, 1]. alpha feeds the smallness margin.
HypothesisReport check_A1(const MetricSpec& spec, double lambda,
                          const LatticeSpec& lattice = {},
                          double alpha = 0.5);

// C^1-norm estimate: max over the lattice of |h_ab|, |d h_ab|, |h^ab|,
// |d h^ab| (inverse perturbation via d g^-1 = -g^-1 (d g) g^-1).
double c1_norm_H(const MetricSpec& spec, const LatticeSpec& lattice = {});

// lambda1 = lambda^2 / (1 + H + 3 H^2 / lambda).
double ellipticity_bounds(double lambda, double H);

// True iff lambda1 <= -g^00 <= 1/lambda1 and the eigenvalues of the spatial
// block of g_inv lie in [lambda1, 1/lambda1] (tiny roundoff guard applied).
bool spectral_check(const MetricSample& sample, double lambda1);

// H * 700 (1 + R/2)^(alpha+1) / alpha; <= 1 means the small-perturbation
// decay regime applies. Requires 0 < alpha < 1.
double smallness_margin(double H, double R, double alpha);

}  // namespace nlwave

#endif
