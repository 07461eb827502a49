#include "nlwave/foliation.hpp"

#include <algorithm>
#include <cmath>

namespace nlwave {

double PIdentityCheck::residual_fraction() const {
  const double lhs = cone_tau2 + bulk;
  const double rhs = cone_tau1 + boundary_R + source;
  const double scale = std::max({std::abs(cone_tau1), std::abs(cone_tau2),
                                 std::abs(bulk), std::abs(boundary_R),
                                 std::abs(source), 1e-300});
  return std::abs(lhs - rhs) / scale;
}

DiagnosticsEngine::DiagnosticsEngine(const Grid& grid, double dt,
                                     const DiagnosticsOptions& opt)
    : grid_(grid),
      dt_(dt),
      opt_(opt),
      sph_(SphereSampling::product_gauss(opt.sphere_n_theta, opt.sphere_n_phi)),
      index_(index_sets()) {
  leaves_.resize(opt_.leaves.size());
  for (std::size_t i = 0; i < opt_.leaves.size(); ++i)
    leaves_[i].tau = opt_.leaves[i];
  std::sort(leaves_.begin(), leaves_.end(),
            [](const Leaf& a, const Leaf& b) { return a.tau < b.tau; });
  const std::size_t nb = leaves_.size() + 1;
  D_band_.resize(nb);
  src_r3ma_band_.resize(nb);
  ile_ext_band_.resize(nb);
  for (auto [t1, t2] : opt_.p_identity) {
    PIdent p;
    p.tau1 = t1;
    p.tau2 = t2;
    p.p = opt_.p_identity_p;
    pid_.push_back(p);
  }
  for (double v : opt_.cross_cone_v) {
    Cross c;
    c.v = v;
    crossacc_.push_back(c);
  }
}

namespace {

struct PointSampler {
  const Grid* g = nullptr;
  const RingEntry *prev = nullptr, *cen = nullptr, *next = nullptr;
  double dt = 0.0;
  bool want_T = false;
  bool have_F = false;

  struct Values {
    double phi = 0, pi = 0;
    Vec3 grad{};
    double Tphi = 0, Tpi = 0;
    Vec3 Tgrad{};
    double F = 0, TF = 0;
    Vec3 Fgrad{}, TFgrad{};
  };

  Values at(const Vec3& p) const {
    Values v;
    v.phi = trilinear(cen->phi, *g, p);
    v.pi = trilinear(cen->pi, *g, p);
    v.grad = {trilinear(cen->grad.x, *g, p), trilinear(cen->grad.y, *g, p),
              trilinear(cen->grad.z, *g, p)};
    if (want_T) {
      const double i2dt = 1.0 / (2.0 * dt);
      v.Tphi = (trilinear(next->phi, *g, p) - trilinear(prev->phi, *g, p)) * i2dt;
      v.Tpi = (trilinear(next->pi, *g, p) - trilinear(prev->pi, *g, p)) * i2dt;
      v.Tgrad = {(trilinear(next->grad.x, *g, p) - trilinear(prev->grad.x, *g, p)) * i2dt,
                 (trilinear(next->grad.y, *g, p) - trilinear(prev->grad.y, *g, p)) * i2dt,
                 (trilinear(next->grad.z, *g, p) - trilinear(prev->grad.z, *g, p)) * i2dt};
    }
    if (have_F) {
      v.F = trilinear(cen->F, *g, p);
      v.Fgrad = {trilinear(cen->gradF.x, *g, p), trilinear(cen->gradF.y, *g, p),
                 trilinear(cen->gradF.z, *g, p)};
      if (want_T && !prev->F.empty() && !next->F.empty()) {
        const double i2dt = 1.0 / (2.0 * dt);
        v.TF = (trilinear(next->F, *g, p) - trilinear(prev->F, *g, p)) * i2dt;
        v.TFgrad = {(trilinear(next->gradF.x, *g, p) - trilinear(prev->gradF.x, *g, p)) * i2dt,
                    (trilinear(next->gradF.y, *g, p) - trilinear(prev->gradF.y, *g, p)) * i2dt,
                    (trilinear(next->gradF.z, *g, p) - trilinear(prev->gradF.z, *g, p)) * i2dt};
      }
    }
    return v;
  }
};

inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double omega_of(const Vec3& x, const Vec3& grad, int a, int b) {
  return x[a] * grad[b] - x[b] * grad[a];
}

// Sum over the three generators of (Omega phi)^2 given position and grad.
inline double omega_sq_sum(const Vec3& x, const Vec3& gr) {
  const double o01 = omega_of(x, gr, 0, 1);
  const double o02 = omega_of(x, gr, 0, 2);
  const double o12 = omega_of(x, gr, 1, 2);
  return o01 * o01 + o02 * o02 + o12 * o12;
}

}  // namespace

void DiagnosticsEngine::on_step(const WaveSolver& solver, int step) {
  on_ring(solver.ring(), solver.ring_stores_F(), step);
}

void DiagnosticsEngine::on_ring(const std::deque<RingEntry>& ring,
                                bool stores_F, int step) {
  if (ring.size() < 3) return;
  if (step <= last_processed_) return;
  last_processed_ = step;
  process_center(ring, stores_F);
}

void DiagnosticsEngine::process_center(const std::deque<RingEntry>& ring,
                                       bool stores_F) {
  const RingEntry& cen = ring[ring.size() - 2];
  const double t_c = cen.t;
  step_times_.push_back(t_c);

  bool any_cone = false;
  for (auto& lf : leaves_) {
    if (!lf.interior_done && std::abs(lf.tau - t_c) < 0.25 * dt_) {
      leaf_interior(ring, stores_F, lf);
      lf.interior_done = true;
    }
    if (t_c >= lf.tau - 0.25 * dt_ && !lf.complete) any_cone = true;
  }
  if (any_cone)
    for (auto& lf : leaves_)
      if (t_c >= lf.tau - 0.25 * dt_ && !lf.complete)
        leaf_cone(ring, stores_F, lf, t_c);

  band_sweep(ring, stores_F, t_c);
  cross_cone_sweep(ring, t_c);
}

void DiagnosticsEngine::leaf_interior(const std::deque<RingEntry>& ring,
                                      bool stores_F, Leaf& lf) {
  const RingEntry& cen = ring[ring.size() - 2];
  const Grid& g = grid_;
  const double R = opt_.R;

  PointSampler ps{&g, &ring[ring.size() - 3], &cen, &ring[ring.size() - 1],
                  dt_, true, stores_F && !cen.F.empty()};

  lf.E_int = ball_quadrature(g, sph_, R, [&](const Vec3& p, double) {
    const auto v = ps.at(p);
    return v.pi * v.pi + dot3(v.grad, v.grad);
  });
  lf.hardy_int = ball_quadrature(g, sph_, R, [&](const Vec3& p, double r) {
    const auto v = ps.at(p);
    const double w = v.phi / (1.0 + r);
    return w * w;
  });
  lf.max_in = max_abs_in_ball(cen.phi, g, R);
  lf.max_out_w = max_weighted_outside(cen.phi, g, R);

  if (opt_.commuted) {
    lf.E_T_int = ball_quadrature(g, sph_, R, [&](const Vec3& p, double) {
      const auto v = ps.at(p);
      return v.Tpi * v.Tpi + dot3(v.Tgrad, v.Tgrad);
    });
    // E[Omega phi] interior needs grad(pi) and the Hessian of phi.
    GradientField gp = spatial_gradient(cen.pi, g);
    std::vector<double> H[6];
    const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    for (int q = 0; q < 6; ++q)
      H[q] = second_derivative(cen.phi, g, pairs[q][0], pairs[q][1]);
    auto hess_at = [&](const Vec3& p, int a, int b) {
      if (a == b) return trilinear(H[a], g, p);
      const int map[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
      return trilinear(H[map[a][b]], g, p);
    };
    lf.E_Om_int = ball_quadrature(g, sph_, R, [&](const Vec3& p, double) {
      const auto v = ps.at(p);
      const Vec3 gpi = {trilinear(gp.x, g, p), trilinear(gp.y, g, p),
                        trilinear(gp.z, g, p)};
      double acc = 0.0;
      const int gens[3][2] = {{0, 1}, {0, 2}, {1, 2}};
      for (auto [a, b] : gens) {
        const double opi = omega_of(p, gpi, a, b);
        Vec3 go{};
        for (int c = 0; c < 3; ++c) {
          go[c] = p[a] * hess_at(p, c, b) - p[b] * hess_at(p, c, a);
          if (c == a) go[c] += v.grad[b];
          if (c == b) go[c] -= v.grad[a];
        }
        acc += opi * opi + dot3(go, go);
      }
      return acc;
    });
  }

  if (opt_.monitors && stores_F && !cen.F.empty()) {
    // Interior monitors at depth (monitor_k, monitor_j) <= (1,1):
    // sum over A (resp. B) of the squared commuted nonlinearity (resp. its
    // spatial gradient) over the ball.
    std::vector<double> TFarr(g.size(), 0.0);
    const RingEntry& prev = ring[ring.size() - 3];
    const RingEntry& next = ring[ring.size() - 1];
    const bool haveTF = !prev.F.empty() && !next.F.empty();
    if (haveTF)
      for (std::size_t c = 0; c < g.size(); ++c)
        TFarr[c] = (next.F[c] - prev.F[c]) / (2.0 * dt_);
    GradientField gTF = haveTF ? spatial_gradient(TFarr, g) : GradientField{};

    std::vector<double> HF[6], HTF[6];
    const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    const bool wantK1 = opt_.monitor_k >= 1;
    if (wantK1) {
      for (int q = 0; q < 6; ++q) {
        HF[q] = second_derivative(cen.F, g, pairs[q][0], pairs[q][1]);
        if (haveTF)
          HTF[q] = second_derivative(TFarr, g, pairs[q][0], pairs[q][1]);
      }
    }
    auto hessF_at = [&](const std::vector<double>* HH, const Vec3& p, int a,
                        int b) {
      const int map[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
      return trilinear(HH[a == b ? a : map[a][b]], g, p);
    };

    auto monitor_pair = [&](const std::vector<double>& f,
                            const GradientField& gf,
                            const std::vector<double>* HH, double& val,
                            double& gval, bool in_A, bool in_B) {
      if (in_A)
        val += ball_quadrature(g, sph_, R, [&](const Vec3& p, double) {
          const double u = trilinear(f, g, p);
          return u * u;
        });
      if (in_B)
        gval += ball_quadrature(g, sph_, R, [&](const Vec3& p, double) {
          const Vec3 gr = {trilinear(gf.x, g, p), trilinear(gf.y, g, p),
                           trilinear(gf.z, g, p)};
          return dot3(gr, gr);
        });
      if (opt_.monitor_k >= 1 && HH) {
        const int gens[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        if (in_A)
          val += ball_quadrature(g, sph_, R, [&](const Vec3& p, double) {
            const Vec3 gr = {trilinear(gf.x, g, p), trilinear(gf.y, g, p),
                             trilinear(gf.z, g, p)};
            double acc = 0.0;
            for (auto [a, b] : gens) {
              const double o = omega_of(p, gr, a, b);
              acc += o * o;
            }
            return acc;
          });
        if (in_B)
          gval += ball_quadrature(g, sph_, R, [&](const Vec3& p, double) {
            const Vec3 gr = {trilinear(gf.x, g, p), trilinear(gf.y, g, p),
                             trilinear(gf.z, g, p)};
            double acc = 0.0;
            for (auto [a, b] : gens) {
              Vec3 go{};
              for (int c = 0; c < 3; ++c) {
                go[c] = p[a] * hessF_at(HH, p, c, b) -
                        p[b] * hessF_at(HH, p, c, a);
                if (c == a) go[c] += gr[b];
                if (c == b) go[c] -= gr[a];
              }
              acc += dot3(go, go);
            }
            return acc;
          });
      }
    };

    double val = 0.0, gval = 0.0;
    monitor_pair(cen.F, cen.gradF, wantK1 ? HF : nullptr, val, gval,
                 index_.in_A(0, 0), index_.in_B(0, 0));
    if (opt_.monitor_j >= 1 && haveTF)
      monitor_pair(TFarr, gTF, wantK1 ? HTF : nullptr, val, gval,
                   index_.in_A(0, 1), index_.in_B(0, 1));
    lf.monitor_interior = val;
    lf.monitor_grad = gval;
  }
}

void DiagnosticsEngine::leaf_cone(const std::deque<RingEntry>& ring,
                                  bool stores_F, Leaf& lf, double t_c) {
  const double R = opt_.R;
  const double r = t_c - lf.tau + R;
  if (r < R - 1e-12) return;
  const Grid& g = grid_;
  if (r + g.h > g.R_dom()) {
    lf.complete = true;  // sphere has left the grid; support argument
    return;
  }
  const RingEntry& cen = ring[ring.size() - 2];
  PointSampler ps{&g, &ring[ring.size() - 3], &cen, &ring[ring.size() - 1],
                  dt_, opt_.commuted, stores_F && !cen.F.empty()};

  // Hessian of phi and grad(pi), needed for the Omega-commuted flux.
  std::vector<double> H[6];
  GradientField gp;
  if (opt_.commuted) {
    const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    for (int q = 0; q < 6; ++q)
      H[q] = second_derivative(cen.phi, g, pairs[q][0], pairs[q][1]);
    gp = spatial_gradient(cen.pi, g);
  }
  auto hess_at = [&](const Vec3& p, int a, int b) {
    const int map[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
    return trilinear(H[a == b ? a : map[a][b]], g, p);
  };

  double base = 0.0, fT = 0.0, fOm = 0.0, p1 = 0.0, p2 = 0.0, hc = 0.0,
         psis = 0.0, phisq = 0.0;
  const double r2 = r * r;
  const double wp1 = r, wp2 = std::pow(r, 2.0 - opt_.alpha);
  for (int q = 0; q < sph_.count(); ++q) {
    const Vec3& w = sph_.node[q];
    const Vec3 p = {r * w[0], r * w[1], r * w[2]};
    const auto v = ps.at(p);
    const double dr = dot3(w, v.grad);
    const double dv = v.pi + dr;
    const double ang2 = std::max(0.0, dot3(v.grad, v.grad) - dr * dr);
    const double psi_v = r * dv + v.phi;
    const double wq = sph_.w[q];
    base += wq * (dv * dv + ang2) * r2;
    p1 += wq * wp1 * psi_v * psi_v;
    p2 += wq * wp2 * psi_v * psi_v;
    const double hw = v.phi / (1.0 + r);
    hc += wq * hw * hw * r2;
    psis += wq * (psi_v * psi_v + ang2 * r2);
    phisq += wq * v.phi * v.phi;
    if (opt_.commuted) {
      const double drT = dot3(w, v.Tgrad);
      const double dvT = v.Tpi + drT;
      const double ang2T = std::max(0.0, dot3(v.Tgrad, v.Tgrad) - drT * drT);
      fT += wq * (dvT * dvT + ang2T) * r2;
      const Vec3 gpi = {trilinear(gp.x, g, p), trilinear(gp.y, g, p),
                        trilinear(gp.z, g, p)};
      const int gens[3][2] = {{0, 1}, {0, 2}, {1, 2}};
      double acc = 0.0;
      for (auto [a, b] : gens) {
        const double opi = omega_of(p, gpi, a, b);
        Vec3 go{};
        for (int c = 0; c < 3; ++c) {
          go[c] = p[a] * hess_at(p, c, b) - p[b] * hess_at(p, c, a);
          if (c == a) go[c] += v.grad[b];
          if (c == b) go[c] -= v.grad[a];
        }
        const double drO = dot3(w, go);
        const double dvO = opi + drO;
        const double angO = std::max(0.0, dot3(go, go) - drO * drO);
        acc += dvO * dvO + angO;
      }
      fOm += acc * wq * r2;
    }
  }
  lf.flux.add(base, dt_);
  lf.p1.add(p1, dt_);
  lf.p2ma.add(p2, dt_);
  lf.hardy_cone.add(hc, dt_);
  lf.psi_side.add(psis, dt_);
  lf.lemma1_max = std::max(lf.lemma1_max, r * phisq);
  if (opt_.commuted) {
    lf.flux_T.add(fT, dt_);
    lf.flux_Om.add(fOm, dt_);
  }

  // p-identity cone boundary terms when this leaf is one of a tracked pair.
  for (auto& pid : pid_) {
    const bool is1 = std::abs(pid.tau1 - lf.tau) < 0.25 * dt_;
    const bool is2 = std::abs(pid.tau2 - lf.tau) < 0.25 * dt_;
    if (!is1 && !is2) continue;
    double cone = 0.0;
    for (int q = 0; q < sph_.count(); ++q) {
      const Vec3& w = sph_.node[q];
      const Vec3 p = {r * w[0], r * w[1], r * w[2]};
      const auto v = ps.at(p);
      const double dv = v.pi + dot3(w, v.grad);
      const double psi_v = r * dv + v.phi;
      cone += sph_.w[q] * std::pow(r, pid.p) * psi_v * psi_v;
    }
    if (is1) pid.cone1_acc.add(cone, dt_);
    if (is2) pid.cone2_acc.add(cone, dt_);
  }
}

void DiagnosticsEngine::band_sweep(const std::deque<RingEntry>& ring,
                                   bool stores_F, double t_c) {
  const bool wantF = stores_F;
  const bool want_ile = opt_.track_ile;
  const bool want_pid = !pid_.empty();
  if (!wantF && !want_ile && !want_pid) {
    D_interior_steps_.push_back(0.0);
    ile_interior_steps_.push_back(0.0);
    return;
  }
  const Grid& g = grid_;
  const RingEntry& cen = ring[ring.size() - 2];
  const double R = opt_.R;
  const double alpha = opt_.alpha;
  PointSampler ps{&g, &ring[ring.size() - 3], &cen, &ring[ring.size() - 1],
                  dt_, opt_.monitors && wantF, wantF && !cen.F.empty()};

  const double r_front = std::min(R + t_c + 4.0 * g.h, g.R_dom() - 1.001 * g.h);
  const double dr = 0.5 * g.h;
  const int mshell = std::max(2, static_cast<int>(std::ceil(r_front / dr)) + 1);

  double D_int = 0.0, ile_int = 0.0;
  std::vector<double> D_ext(D_band_.size(), 0.0);
  std::vector<double> src_ext(src_r3ma_band_.size(), 0.0);
  std::vector<double> ile_ext(ile_ext_band_.size(), 0.0);
  std::vector<double> pid_bulk(pid_.size(), 0.0), pid_src(pid_.size(), 0.0);

  auto bucket_of = [&](double taup) {
    std::size_t b = 0;
    while (b < leaves_.size() && taup >= leaves_[b].tau - 1e-9) ++b;
    return b;
  };

  for (int qsh = 0; qsh < mshell; ++qsh) {
    const double r = qsh * dr;
    if (r > r_front) break;
    const double trap = (qsh == 0 || qsh == mshell - 1) ? 0.5 : 1.0;
    const double wr = trap * dr * r * r;
    double fsq = 0.0, e_w = 0.0, src3 = 0.0;
    double bulks[8] = {0};  // per tracked p-identity pair (capped)
    double srcs[8] = {0};
    for (int q = 0; q < sph_.count(); ++q) {
      const Vec3& w = sph_.node[q];
      const Vec3 p = {r * w[0], r * w[1], r * w[2]};
      const auto v = ps.at(p);
      const double wq = sph_.w[q];
      if (wantF && !cen.F.empty()) {
        fsq += wq * v.F * v.F;
        if (opt_.monitors && r >= R - 1e-12) {
          // Commuted nonlinearity samples at depth <= (1,1).
          double acc = v.F * v.F;
          if (opt_.monitor_j >= 1) acc += v.TF * v.TF;
          if (opt_.monitor_k >= 1) {
            acc += omega_sq_sum(p, v.Fgrad);
            if (opt_.monitor_j >= 1) acc += omega_sq_sum(p, v.TFgrad);
          }
          src3 += wq * acc;
        }
      }
      if (want_ile || want_pid) {
        const double drv = dot3(w, v.grad);
        const double ang2 = std::max(0.0, dot3(v.grad, v.grad) - drv * drv);
        if (want_ile) {
          const double num = v.pi * v.pi + drv * drv + ang2;
          double term = num / std::pow(1.0 + r, alpha + 1.0);
          if (r > 1e-12)
            term += v.phi * v.phi / (r * std::pow(1.0 + r, alpha + 2.0));
          e_w += wq * term;
        }
        if (want_pid && r >= R - 1e-12) {
          const double dv = v.pi + drv;
          const double psi_v = r * dv + v.phi;
          for (std::size_t ip = 0; ip < pid_.size() && ip < 8; ++ip) {
            const double taup = t_c - r + R;
            if (taup < pid_[ip].tau1 - 1e-9 || taup > pid_[ip].tau2 + 1e-9)
              continue;
            const double pp = pid_[ip].p;
            const double rpm1 = std::pow(r, pp - 1.0);
            bulks[ip] += wq * (pp * rpm1 * psi_v * psi_v +
                               (2.0 - pp) * rpm1 * ang2 * r * r);
            if (wantF && !cen.F.empty())
              srcs[ip] += wq * std::pow(r, pp + 1.0) * v.F * psi_v;
          }
        }
      }
    }
    const double taup = t_c - r + R;
    if (r < R - 1e-12) {
      D_int += wr * fsq * std::pow(1.0 + r, alpha + 1.0);
      ile_int += wr * e_w;
    } else {
      const std::size_t b = bucket_of(taup);
      D_ext[b] += wr * fsq * std::pow(1.0 + r, alpha + 1.0);
      ile_ext[b] += wr * e_w;
      src_ext[b] += wr * src3 * std::pow(r, 3.0 - alpha);
      for (std::size_t ip = 0; ip < pid_.size() && ip < 8; ++ip) {
        // Bulk and source carry the (1/2) dt dr measure; the r^2 from the
        // spherical area is already inside the integrand powers.
        pid_bulk[ip] += 0.5 * trap * dr * bulks[ip];
        pid_src[ip] += -1.0 * trap * dr * srcs[ip];
      }
    }
  }

  D_interior_steps_.push_back(D_int);
  ile_interior_steps_.push_back(ile_int);
  for (std::size_t b = 0; b < D_band_.size(); ++b) {
    D_band_[b].add(D_ext[b], dt_);
    ile_ext_band_[b].add(ile_ext[b], dt_);
    src_r3ma_band_[b].add(src_ext[b], dt_);
  }

  // r = R boundary term of the p-identity, active for t_c in [tau1, tau2].
  for (std::size_t ip = 0; ip < pid_.size(); ++ip) {
    auto& pid = pid_[ip];
    pid.bulk.add(pid_bulk[ip], dt_);
    pid.source.add(pid_src[ip], dt_);
    if (t_c >= pid.tau1 - 1e-9 && t_c <= pid.tau2 + 1e-9) {
      double bb = 0.0;
      for (int q = 0; q < sph_.count(); ++q) {
        const Vec3& w = sph_.node[q];
        const Vec3 p = {R * w[0], R * w[1], R * w[2]};
        const auto v = ps.at(p);
        const double drv = dot3(w, v.grad);
        const double ang2 = std::max(0.0, dot3(v.grad, v.grad) - drv * drv);
        const double dv = v.pi + drv;
        const double psi_v = R * dv + v.phi;
        bb += sph_.w[q] * std::pow(R, pid.p) *
              (ang2 * R * R - psi_v * psi_v);
      }
      pid.boundary_R.add(0.5 * bb, dt_);
    }
  }
}

void DiagnosticsEngine::cross_cone_sweep(const std::deque<RingEntry>& ring,
                                         double t_c) {
  if (crossacc_.empty()) return;
  const Grid& g = grid_;
  const RingEntry& cen = ring[ring.size() - 2];
  PointSampler ps{&g, &ring[ring.size() - 3], &cen, &ring[ring.size() - 1],
                  dt_, false, false};
  for (auto& cc : crossacc_) {
    const double r = 2.0 * cc.v - t_c;
    if (r < opt_.R || r + g.h > g.R_dom()) continue;
    double lhs = 0.0, flux = 0.0, bnd = 0.0;
    for (int q = 0; q < sph_.count(); ++q) {
      const Vec3& w = sph_.node[q];
      const Vec3 p = {r * w[0], r * w[1], r * w[2]};
      const auto v = ps.at(p);
      const double drv = dot3(w, v.grad);
      const double du = v.pi - drv;
      const double ang2 = std::max(0.0, dot3(v.grad, v.grad) - drv * drv);
      const double dupsi = r * du - v.phi;
      lhs += sph_.w[q] * dupsi * dupsi;
      flux += sph_.w[q] * (du * du + ang2) * r * r;
      bnd += sph_.w[q] * r * v.phi * v.phi;
    }
    cc.lhs.add(lhs, dt_);
    cc.flux.add(flux, dt_);
    if (!cc.started) {
      cc.first_boundary = bnd;
      cc.started = true;
    }
    cc.last_boundary = bnd;
    ++cc.samples;
  }
}

EnergyBreakdown DiagnosticsEngine::energy_flux(double tau) const {
  for (const auto& lf : leaves_) {
    if (std::abs(lf.tau - tau) < 0.25 * dt_) {
      EnergyBreakdown eb;
      eb.tau = lf.tau;
      eb.interior = lf.E_int;
      eb.null_truncated = lf.flux.sum;
      eb.null_complete = lf.complete;
      eb.E_total = eb.interior + eb.null_truncated;
      return eb;
    }
  }
  throw std::invalid_argument("energy_flux: tau is not a scheduled leaf");
}

std::vector<LeafDiagnostics> DiagnosticsEngine::rows() const {
  std::vector<LeafDiagnostics> out;
  // Tail-cumulative source monitor per leaf.
  std::vector<double> tail(leaves_.size() + 1, 0.0);
  for (int b = static_cast<int>(leaves_.size()); b >= 0; --b) {
    tail[b] = src_r3ma_band_[b].sum;
    if (b + 1 <= static_cast<int>(leaves_.size())) tail[b] += tail[b + 1];
  }
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    const Leaf& lf = leaves_[i];
    LeafDiagnostics row;
    row.tau = lf.tau;
    row.E_interior = lf.E_int;
    row.E_null = lf.flux.sum;
    row.E_total = lf.E_int + lf.flux.sum;
    row.null_complete = lf.complete;
    row.p1_flux = lf.p1.sum;
    row.p2ma_flux = lf.p2ma.sum;
    row.D_cum = D_norm(0.0, lf.tau);
    row.max_phi_inner = lf.max_in;
    row.max_phi_outer_weighted = lf.max_out_w;
    row.E_T = lf.E_T_int + lf.flux_T.sum;
    row.E_Omega = lf.E_Om_int + lf.flux_Om.sum;
    row.hardy_lhs = lf.hardy_int + lf.hardy_cone.sum;
    row.hardy_defined = row.E_total > 0.0;
    row.hardy_ratio = row.hardy_defined ? row.hardy_lhs / row.E_total : 0.0;
    row.psi_side = lf.psi_side.sum;
    row.phi_side = lf.flux.sum;
    row.lemma1_max = lf.lemma1_max;
    row.source_r3ma = tail[i + 1];
    row.monitor_interior = lf.monitor_interior;
    row.monitor_grad = lf.monitor_grad;
    out.push_back(row);
  }
  return out;
}

DecaySeries DiagnosticsEngine::series() const {
  DecaySeries s;
  for (const auto& row : rows()) {
    s.tau.push_back(row.tau);
    s.E_total.push_back(row.E_total);
    s.E_interior.push_back(row.E_interior);
    s.max_phi_inner.push_back(row.max_phi_inner);
    s.max_phi_outer_weighted.push_back(row.max_phi_outer_weighted);
    s.E_T.push_back(row.E_T);
    s.E_Omega.push_back(row.E_Omega);
  }
  return s;
}

double DiagnosticsEngine::D_norm(double tau1, double tau2) const {
  if (tau2 < tau1) throw std::invalid_argument("D_norm: tau2 < tau1");
  double acc = 0.0;
  // Interior: trapezoid over processed steps inside the window.
  for (std::size_t m = 0; m + 1 < step_times_.size(); ++m) {
    const double t0 = step_times_[m], t1 = step_times_[m + 1];
    if (t0 < tau1 - 1e-9 || t1 > tau2 + 1e-9) continue;
    acc += 0.5 * (t1 - t0) *
           (D_interior_steps_[m] + D_interior_steps_[m + 1]);
  }
  // Exterior: banded buckets fully inside the window.
  for (std::size_t b = 0; b < D_band_.size(); ++b) {
    const double lo = (b == 0) ? 0.0 : leaves_[b - 1].tau;
    const double hi =
        (b < leaves_.size()) ? leaves_[b].tau : std::numeric_limits<double>::infinity();
    if (lo >= tau1 - 1e-9 && hi <= tau2 + 1e-9) acc += D_band_[b].sum;
  }
  return acc;
}

double DiagnosticsEngine::ile_lhs(double tau1, double tau2) const {
  double acc = 0.0;
  for (std::size_t m = 0; m + 1 < step_times_.size(); ++m) {
    const double t0 = step_times_[m], t1 = step_times_[m + 1];
    if (t0 < tau1 - 1e-9 || t1 > tau2 + 1e-9) continue;
    acc += 0.5 * (t1 - t0) *
           (ile_interior_steps_[m] + ile_interior_steps_[m + 1]);
  }
  for (std::size_t b = 0; b < ile_ext_band_.size(); ++b) {
    const double lo = (b == 0) ? 0.0 : leaves_[b - 1].tau;
    const double hi =
        (b < leaves_.size()) ? leaves_[b].tau : std::numeric_limits<double>::infinity();
    if (lo >= tau1 - 1e-9 && hi <= tau2 + 1e-9) acc += ile_ext_band_[b].sum;
  }
  return acc;
}

double DiagnosticsEngine::ile_bound(double tau1, double tau2) const {
  const double beta = 2.0 / opt_.alpha;
  const double C = (18.0 * beta) * (18.0 * beta);
  return C * (energy_flux(tau1).E_total + D_norm(tau1, tau2));
}

std::vector<CrossConeCheck> DiagnosticsEngine::cross_cone() const {
  std::vector<CrossConeCheck> out;
  for (const auto& cc : crossacc_) {
    CrossConeCheck c;
    c.v = cc.v;
    c.lhs = cc.lhs.sum;
    // The accumulated integrand ((d_u phi)^2 + |ang phi|^2) r^2 is already
    // twice the J^T flux density through the ingoing surface.
    c.flux_bound = cc.flux.sum;
    c.boundary_term = cc.first_boundary + cc.last_boundary;
    c.samples = cc.samples;
    out.push_back(c);
  }
  return out;
}

std::vector<PIdentityCheck> DiagnosticsEngine::p_identity_checks() const {
  std::vector<PIdentityCheck> out;
  for (const auto& pid : pid_) {
    PIdentityCheck c;
    c.p = pid.p;
    c.tau1 = pid.tau1;
    c.tau2 = pid.tau2;
    c.cone_tau1 = pid.cone1_acc.sum;
    c.cone_tau2 = pid.cone2_acc.sum;
    c.bulk = pid.bulk.sum;
    c.boundary_R = pid.boundary_R.sum;
    c.source = pid.source.sum;
    out.push_back(c);
  }
  return out;
}

HardyResult hardy_check(const LeafDiagnostics& row) {
  HardyResult r;
  if (!(row.E_total > 0.0)) return r;
  r.defined = true;
  r.ratio = row.hardy_lhs / row.E_total;
  return r;
}

PsiPhiResult psi_phi_equivalence(const LeafDiagnostics& row) {
  PsiPhiResult r;
  r.defect = std::abs(row.psi_side - row.phi_side);
  r.bound = 2.0 * row.E_total;
  if (row.E_total > 0.0) {
    r.defined = true;
    r.ratio = r.defect / r.bound;
  }
  return r;
}

}  // namespace nlwave
