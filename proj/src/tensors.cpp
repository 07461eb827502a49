#include "nlwave/tensors.hpp"

#include <cmath>

namespace nlwave {

Mat4 stress_energy(const Vec4& dphi, const MetricSample& m) {
  double q = 0.0;  // d^c phi d_c phi
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) q += m.g_inv[a][b] * dphi[a] * dphi[b];
  Mat4 T;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      T[a][b] = dphi[a] * dphi[b] - 0.5 * m.g[a][b] * q;
  return T;
}

CurrentOutput currents(MultiplierField X, const Vec4& dphi, double phi,
                       const MetricSample& m, const Vec3& x,
                       const MultiplierProfile& profile) {
  CurrentOutput out;
  const Mat4 T = stress_energy(dphi, m);
  const double sqrtmg = std::sqrt(-m.det_G);
  const double r = norm3(x);
  const double alpha = profile.alpha;

  // Deformation tensor pi^X_ab = (1/2) L_X g_ab and the current J_a
  // (modified with the chi terms for the radial multiplier).
  Mat4 piX{};
  Vec4 J{};
  if (X == MultiplierField::T) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) piX[a][b] = 0.5 * m.dg[0][a][b];
    for (int a = 0; a < 4; ++a) J[a] = T[a][0];
  } else {
    const double f = MultiplierProfile::f_at(alpha, r);
    const double fp = MultiplierProfile::fprime_at(alpha, r);
    const double chi = MultiplierProfile::chi_at(alpha, r);
    const double chip = MultiplierProfile::chiprime_at(alpha, r);
    Vec4 Xv{};
    double dX[4][4] = {};  // dX[mu][gamma] = d_mu X^gamma
    if (r < 1e-8) {
      for (int i = 1; i <= 3; ++i) dX[i][i] = MultiplierProfile::fprime_at(alpha, 0.0);
    } else {
      for (int i = 1; i <= 3; ++i) Xv[i] = f * x[i - 1] / r;
      for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
          const double xi = x[i - 1], xj = x[j - 1];
          const double del = (i == j) ? 1.0 : 0.0;
          dX[j][i] = fp * xi * xj / (r * r) + f * (del / r - xi * xj / (r * r * r));
        }
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double lie = 0.0;
        for (int c = 0; c < 4; ++c)
          lie += Xv[c] * m.dg[c][a][b] + m.g[c][b] * dX[a][c] +
                 m.g[a][c] * dX[b][c];
        piX[a][b] = 0.5 * lie;
      }
    // Modified current: J~_a = T_ab X^b - (1/2) d_a chi phi^2
    //                        + (1/2) chi d_a phi^2.
    Vec4 dchi{};
    if (r >= 1e-8)
      for (int i = 1; i <= 3; ++i) dchi[i] = chip * x[i - 1] / r;
    for (int a = 0; a < 4; ++a) {
      double tx = 0.0;
      for (int b = 0; b < 4; ++b) tx += T[a][b] * Xv[b];
      J[a] = tx - 0.5 * dchi[a] * phi * phi + chi * phi * dphi[a];
    }
  }

  // Bulk scalar K = T^{ab} pi_ab with indices raised by g_inv.
  double K = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double Tup = 0.0;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          Tup += m.g_inv[a][c] * m.g_inv[b][d] * T[c][d];
      K += Tup * piX[a][b];
    }
  out.K = K;

  // Spacelike (t = const) flux density per dx: -g^{0a} J_a sqrt(-G).
  double sd = 0.0;
  for (int a = 0; a < 4; ++a) sd += m.g_inv[0][a] * J[a];
  out.spacelike_density = -sd * sqrtmg;

  // Outgoing null flux density per r^2 dv domega (flat-exterior formulas;
  // d_v = d_t + d_r).
  if (r >= 1e-8) {
    const double dr_phi =
        (dphi[1] * x[0] + dphi[2] * x[1] + dphi[3] * x[2]) / r;
    const double dv_phi = dphi[0] + dr_phi;
    const double grad2 =
        dphi[1] * dphi[1] + dphi[2] * dphi[2] + dphi[3] * dphi[3];
    const double ang2 = std::max(0.0, grad2 - dr_phi * dr_phi);
    if (X == MultiplierField::T) {
      out.null_density = 0.5 * (dv_phi * dv_phi + ang2);
    } else {
      const double f = MultiplierProfile::f_at(alpha, r);
      const double chi = MultiplierProfile::chi_at(alpha, r);
      const double chip = MultiplierProfile::chiprime_at(alpha, r);
      out.null_density = 0.5 * f * (dv_phi * dv_phi - ang2) -
                         0.5 * chip * phi * phi + chi * dv_phi * phi;
    }
  }
  return out;
}

}  // namespace nlwave
