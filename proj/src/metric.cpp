#include "nlwave/metric.hpp"

#include <cmath>
#include <limits>

#include "nlwave/bump.hpp"

namespace nlwave {

namespace {

struct FamilyEval {
  // h and its first derivatives dh[c][a][b] = d_c h_ab, plus the pure-time
  // second derivatives dt_dh[c][a][b] = d_t d_c h_ab used by the commutator
  // diagnostics.
  Mat4 h{};
  double dh[4][4][4] = {};
  double dt_dh[4][4][4] = {};
  bool flat = true;
};

FamilyEval eval_family(const MetricSpec& spec, double t, const Vec3& x,
                       bool want_second) {
  FamilyEval out;
  if (spec.is_flat()) return out;
  const double R2 = spec.support_radius();
  const double r = norm3(x);
  const double s = r / R2;
  if (s >= kBumpEdge) return out;
  out.flat = false;

  const double B = bump(s);
  const double W = bump_w(s);  // d_j B = W x_j / R2^2
  const double a = spec.amplitude;
  const double a2 = spec.shift_amplitude;
  const double w = spec.omega;
  const double cwt = std::cos(w * t);
  const double swt = std::sin(w * t);

  // Diagonal temporal factors: index 0 is h_00, 1..3 are h_ii.
  double cos_d[4], sin_d[4];
  cos_d[0] = cwt;
  sin_d[0] = swt;
  for (int i = 0; i < 3; ++i) {
    cos_d[i + 1] = std::cos(w * t + spec.phase[i]);
    sin_d[i + 1] = std::sin(w * t + spec.phase[i]);
  }

  out.h[0][0] = a * B * cos_d[0];
  for (int i = 1; i <= 3; ++i) out.h[i][i] = a * B * cos_d[i];
  for (int i = 1; i <= 3; ++i) {
    out.h[0][i] = a2 * B * swt * x[i - 1] / R2;
    out.h[i][0] = out.h[0][i];
  }

  // Time derivatives.
  out.dh[0][0][0] = -a * w * B * sin_d[0];
  for (int i = 1; i <= 3; ++i) out.dh[0][i][i] = -a * w * B * sin_d[i];
  for (int i = 1; i <= 3; ++i) {
    out.dh[0][0][i] = a2 * w * B * cwt * x[i - 1] / R2;
    out.dh[0][i][0] = out.dh[0][0][i];
  }

  // Spatial derivatives (d_j with j = 1..3 spacetime index).
  const double R2sq = R2 * R2;
  for (int j = 1; j <= 3; ++j) {
    const double dBj = W * x[j - 1] / R2sq;
    out.dh[j][0][0] = a * cos_d[0] * dBj;
    for (int i = 1; i <= 3; ++i) out.dh[j][i][i] = a * cos_d[i] * dBj;
    for (int i = 1; i <= 3; ++i) {
      const double del = (i == j) ? 1.0 : 0.0;
      out.dh[j][0][i] =
          a2 * swt * (dBj * x[i - 1] / R2 + B * del / R2);
      out.dh[j][i][0] = out.dh[j][0][i];
    }
  }

  if (want_second) {
    out.dt_dh[0][0][0] = -a * w * w * B * cos_d[0];
    for (int i = 1; i <= 3; ++i)
      out.dt_dh[0][i][i] = -a * w * w * B * cos_d[i];
    for (int i = 1; i <= 3; ++i) {
      out.dt_dh[0][0][i] = -a2 * w * w * B * swt * x[i - 1] / R2;
      out.dt_dh[0][i][0] = out.dt_dh[0][0][i];
    }
    for (int j = 1; j <= 3; ++j) {
      const double dBj = W * x[j - 1] / R2sq;
      out.dt_dh[j][0][0] = -a * w * sin_d[0] * dBj;
      for (int i = 1; i <= 3; ++i)
        out.dt_dh[j][i][i] = -a * w * sin_d[i] * dBj;
      for (int i = 1; i <= 3; ++i) {
        const double del = (i == j) ? 1.0 : 0.0;
        out.dt_dh[j][0][i] =
            a2 * w * cwt * (dBj * x[i - 1] / R2 + B * del / R2);
        out.dt_dh[j][i][0] = out.dt_dh[j][0][i];
      }
    }
  }
  return out;
}

MetricSample minkowski_sample() {
  MetricSample s;
  s.g = minkowski();
  s.g_inv = minkowski();
  s.det_G = -1.0;
  return s;
}

// -(g^-1 (d_c g) g^-1) for one derivative direction.
Mat4 dginv_from_dg(const Mat4& ginv, const double dg[4][4]) {
  Mat4 tmp{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double acc = 0.0;
      for (int m = 0; m < 4; ++m) acc += dg[a][m] * ginv[m][b];
      tmp[a][b] = acc;
    }
  Mat4 out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double acc = 0.0;
      for (int m = 0; m < 4; ++m) acc += ginv[a][m] * tmp[m][b];
      out[a][b] = -acc;
    }
  return out;
}

}  // namespace

MetricSample eval_metric(const MetricSpec& spec, double t, const Vec3& x) {
  const FamilyEval fam = eval_family(spec, t, x, /*want_second=*/false);
  if (fam.flat) return minkowski_sample();

  MetricSample s;
  s.g = minkowski();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) s.g[a][b] += fam.h[a][b];
  double det = 0.0;
  try {
    s.g_inv = mat4_inverse(s.g, &det);
  } catch (const std::runtime_error&) {
    throw HyperbolicityError("metric is numerically singular at this event");
  }
  if (!(det < 0.0))
    throw HyperbolicityError("metric determinant is not negative");
  s.det_G = det;
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) s.dg[c][a][b] = fam.dh[c][a][b];

  // b^beta = sum_a d_a g^{a beta} + (1/2) g^{a beta} g^{mn} d_a g_mn,
  // using d_a sqrt(-G) = (1/2) sqrt(-G) g^{mn} d_a g_mn.
  Mat4 dginv[4];
  double trace[4];
  for (int c = 0; c < 4; ++c) {
    dginv[c] = dginv_from_dg(s.g_inv, s.dg[c]);
    double tr = 0.0;
    for (int m = 0; m < 4; ++m)
      for (int nn = 0; nn < 4; ++nn) tr += s.g_inv[m][nn] * s.dg[c][m][nn];
    trace[c] = tr;
  }
  for (int beta = 0; beta < 4; ++beta) {
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
      acc += dginv[a][a][beta] + 0.5 * s.g_inv[a][beta] * trace[a];
    s.b[beta] = acc;
  }
  return s;
}

MetricTimeDerivs eval_metric_time_derivs(const MetricSpec& spec, double t,
                                         const Vec3& x) {
  MetricTimeDerivs out;
  const FamilyEval fam = eval_family(spec, t, x, /*want_second=*/true);
  if (fam.flat) return out;
  const MetricSample s = eval_metric(spec, t, x);

  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out.dt_dg[c][a][b] = fam.dt_dh[c][a][b];

  const Mat4 dtginv = dginv_from_dg(s.g_inv, s.dg[0]);
  out.dt_g_inv = dtginv;

  // d_t of dginv[c] = -(dtginv dg[c] ginv + ginv dt_dg[c] ginv
  //                     + ginv dg[c] dtginv).
  Mat4 dt_dginv[4];
  double dt_trace[4];
  for (int c = 0; c < 4; ++c) {
    Mat4 m1{}, m2{}, m3{};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (int p = 0; p < 4; ++p)
          for (int q = 0; q < 4; ++q) {
            s1 += dtginv[a][p] * s.dg[c][p][q] * s.g_inv[q][b];
            s2 += s.g_inv[a][p] * out.dt_dg[c][p][q] * s.g_inv[q][b];
            s3 += s.g_inv[a][p] * s.dg[c][p][q] * dtginv[q][b];
          }
        m1[a][b] = s1;
        m2[a][b] = s2;
        m3[a][b] = s3;
      }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        dt_dginv[c][a][b] = -(m1[a][b] + m2[a][b] + m3[a][b]);

    double tr = 0.0;
    for (int m = 0; m < 4; ++m)
      for (int nn = 0; nn < 4; ++nn)
        tr += dtginv[m][nn] * s.dg[c][m][nn] +
              s.g_inv[m][nn] * out.dt_dg[c][m][nn];
    dt_trace[c] = tr;
  }

  double trace[4];
  for (int c = 0; c < 4; ++c) {
    double tr = 0.0;
    for (int m = 0; m < 4; ++m)
      for (int nn = 0; nn < 4; ++nn) tr += s.g_inv[m][nn] * s.dg[c][m][nn];
    trace[c] = tr;
  }

  for (int beta = 0; beta < 4; ++beta) {
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
      acc += dt_dginv[a][a][beta] +
             0.5 * (dtginv[a][beta] * trace[a] +
                    s.g_inv[a][beta] * dt_trace[a]);
    out.dt_b[beta] = acc;
  }
  return out;
}

double ellipticity_bounds(double lambda, double H) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("ellipticity_bounds: lambda must be positive");
  return lambda * lambda / (1.0 + H + 3.0 * H * H / lambda);
}

bool spectral_check(const MetricSample& sample, double lambda1) {
  const double lo = lambda1 * (1.0 - 1e-10) - 1e-14;
  const double hi = (1.0 / lambda1) * (1.0 + 1e-10) + 1e-14;
  const double mg00 = -sample.g_inv[0][0];
  if (mg00 < lo || mg00 > hi) return false;
  Mat3 sp;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sp[i][j] = sample.g_inv[i + 1][j + 1];
  const auto ev = sym3_eigenvalues(sp);
  return ev[0] >= lo && ev[2] <= hi;
}

double smallness_margin(double H, double R, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("smallness_margin: need 0 < alpha < 1");
  return H * 700.0 * std::pow(1.0 + 0.5 * R, alpha + 1.0) / alpha;
}

namespace {

template <typename Fn>
void for_each_lattice_event(const MetricSpec& spec, const LatticeSpec& lat,
                            Fn&& fn) {
  if (lat.per_axis < 2 || lat.temporal < 1)
    throw std::invalid_argument("lattice: need >= 2 spatial and >= 1 temporal samples");
  const double R2 = spec.support_radius();
  const int ns = lat.per_axis;
  const bool timedep = !spec.is_flat() && spec.omega != 0.0;
  const int nt = timedep ? lat.temporal : 1;
  const double period = timedep ? 2.0 * std::acos(-1.0) / std::abs(spec.omega) : 0.0;
  for (int it = 0; it < nt; ++it) {
    const double t = timedep ? period * it / nt : 0.0;
    for (int k = 0; k < ns; ++k)
      for (int j = 0; j < ns; ++j)
        for (int i = 0; i < ns; ++i) {
          const Vec3 x = {-R2 + 2.0 * R2 * i / (ns - 1),
                          -R2 + 2.0 * R2 * j / (ns - 1),
                          -R2 + 2.0 * R2 * k / (ns - 1)};
          fn(t, x);
        }
  }
}

}  // namespace

double c1_norm_H(const MetricSpec& spec, const LatticeSpec& lattice) {
  double H = 0.0;
  const Mat4 minv = minkowski();  // m^{ab} = m_ab for this signature
  for_each_lattice_event(spec, lattice, [&](double t, const Vec3& x) {
    MetricSample s;
    try {
      s = eval_metric(spec, t, x);
    } catch (const HyperbolicityError&) {
      H = std::numeric_limits<double>::infinity();
      return;
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        H = std::max(H, std::abs(s.g[a][b] - minv[a][b]));
        H = std::max(H, std::abs(s.g_inv[a][b] - minv[a][b]));
      }
    Mat4 dginv[4];
    for (int c = 0; c < 4; ++c) {
      Mat4 tmp{};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double acc = 0.0;
          for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
              acc += s.g_inv[a][p] * s.dg[c][p][q] * s.g_inv[q][b];
          dginv[c][a][b] = -acc;
        }
    }
    for (int c = 0; c < 4; ++c)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          H = std::max(H, std::abs(s.dg[c][a][b]));
          H = std::max(H, std::abs(dginv[c][a][b]));
        }
  });
  return H;
}

HypothesisReport check_A1(const MetricSpec& spec, double lambda,
                          const LatticeSpec& lattice, double alpha) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("check_A1: lambda must lie in (0, 1]");
  HypothesisReport rep;
  rep.alpha = alpha;
  rep.lattice = lattice;

  double cap = std::numeric_limits<double>::infinity();
  bool ok = true;
  for_each_lattice_event(spec, lattice, [&](double t, const Vec3& x) {
    MetricSample s;
    try {
      s = eval_metric(spec, t, x);
    } catch (const HyperbolicityError&) {
      ok = false;
      cap = 0.0;
      return;
    }
    Mat3 sp;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) sp[i][j] = s.g[i + 1][j + 1];
    const auto ev = sym3_eigenvalues(sp);
    cap = std::min(cap, -s.g[0][0]);
    cap = std::min(cap, ev[0]);
    if (ev[2] > 0.0) cap = std::min(cap, 1.0 / ev[2]);
    else cap = 0.0;
  });
  if (cap < 0.0 || !std::isfinite(cap)) cap = 0.0;

  rep.lambda = cap;
  rep.H = c1_norm_H(spec, lattice);
  rep.passed_A1 = ok && lambda <= cap + 1e-12;
  rep.lambda1 = (rep.passed_A1 && cap > 0.0 && std::isfinite(rep.H))
                    ? ellipticity_bounds(cap, rep.H)
                    : 0.0;
  rep.smallness_margin = std::isfinite(rep.H)
                             ? smallness_margin(rep.H, spec.R, alpha)
                             : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace nlwave
