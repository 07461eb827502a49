#include "nlwave/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "nlwave/bump.hpp"

namespace nlwave {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::nan_abort: return "nan_abort";
    case RunStatus::boundary_breach: return "boundary_breach";
  }
  return "unknown";
}

namespace {
constexpr int kCoeffsPerNode = 14;  // g00 g0i[3] gii[3] gij[3] b[4], all upper
}

WaveSolver::WaveSolver(const SolverConfig& cfg) : cfg_(cfg) {
  if (cfg_.n < 17 || cfg_.n % 2 == 0)
    throw std::invalid_argument("solver: n must be odd and >= 17");
  if (!(cfg_.cfl > 0.0 && cfg_.cfl <= 0.7))
    throw std::invalid_argument("solver: cfl must lie in (0, 0.7]");
  if (!(cfg_.t_max > 0.0))
    throw std::invalid_argument("solver: t_max must be positive");

  double lambda1 = 1.0;
  if (!cfg_.metric.is_flat()) {
    const HypothesisReport rep = check_A1(cfg_.metric, cfg_.lambda, {}, cfg_.alpha);
    if (!rep.passed_A1)
      throw std::invalid_argument(
          "solver: metric fails the uniform-hyperbolicity check at the "
          "configured lambda");
    lambda1 = ellipticity_bounds(cfg_.lambda, rep.H);
  }
  par_.lambda1 = lambda1;
  par_.c_max = 1.0 / lambda1;

  const double R = cfg_.metric.R;
  double h;
  if (cfg_.domain_radius > 0.0) {
    h = 2.0 * cfg_.domain_radius / (cfg_.n - 1);
  } else {
    h = (R + par_.c_max * cfg_.t_max) / (0.5 * (cfg_.n - 1) - 4.0);
  }
  par_.grid = Grid(cfg_.n, h);
  if (par_.grid.R_dom() < R + par_.c_max * cfg_.t_max + 2.0 * h - 1e-12)
    throw std::invalid_argument(
        "solver: domain too small to contain the forward support through "
        "t_max");

  const double dt_cfl = cfg_.cfl * h / par_.c_max;
  par_.steps = std::max(1, static_cast<int>(std::ceil(cfg_.t_max / dt_cfl - 1e-12)));
  par_.dt = cfg_.t_max / par_.steps;

  par_.snapped_schedule.clear();
  for (double tau : cfg_.schedule) {
    if (!(tau > 0.0))
      throw std::invalid_argument("solver: scheduled leaves must be positive");
    if (tau > cfg_.t_max - R + 1e-9)
      throw std::invalid_argument(
          "solver: every scheduled leaf must satisfy tau <= t_max - R");
    const int m = std::max(1, std::min(par_.steps,
        static_cast<int>(std::llround(tau / par_.dt))));
    par_.snapped_schedule.push_back(m * par_.dt);
  }
  std::sort(par_.snapped_schedule.begin(), par_.snapped_schedule.end());
  par_.snapped_schedule.erase(
      std::unique(par_.snapped_schedule.begin(), par_.snapped_schedule.end()),
      par_.snapped_schedule.end());

  cfg_.store_F_in_ring = cfg_.store_F_in_ring || cfg_.nullform.enabled;
  build_cylinder_cache();
}

void WaveSolver::build_cylinder_cache() {
  const Grid& g = par_.grid;
  cyl_index_.assign(g.size(), -1);
  cyl_nodes_.clear();
  if (!cfg_.metric.is_flat()) {
    const double rc = cfg_.metric.support_radius();
    for (int k = 0; k < g.n; ++k)
      for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
          const Vec3 x = g.coord(i, j, k);
          if (norm3(x) < rc) {
            cyl_index_[g.idx(i, j, k)] = static_cast<int>(cyl_nodes_.size());
            cyl_nodes_.push_back(g.idx(i, j, k));
          }
        }
  }
  cyl_coeffs_.assign(cyl_nodes_.size() * kCoeffsPerNode, 0.0);

  source_nodes_.clear();
  if (cfg_.manufactured != ManufacturedId::none) {
    const double R = cfg_.metric.R;
    for (int k = 0; k < g.n; ++k)
      for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
          const Vec3 x = g.coord(i, j, k);
          if (norm3(x) <= R + g.h) source_nodes_.push_back(g.idx(i, j, k));
        }
  }
}

struct WaveSolver::StageMetric {
  double t = std::numeric_limits<double>::quiet_NaN();
};

void WaveSolver::eval_stage_metric(double t, StageMetric& /*m*/) const {
  const Grid& g = par_.grid;
  const int n = g.n;
  std::atomic<bool> bad{false};
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(cyl_nodes_.size());
       ++q) {
    if (bad.load(std::memory_order_relaxed)) continue;
    const std::size_t c = cyl_nodes_[q];
    const int i = static_cast<int>(c % n);
    const int j = static_cast<int>((c / n) % n);
    const int k = static_cast<int>(c / (static_cast<std::size_t>(n) * n));
    MetricSample s;
    try {
      s = eval_metric(cfg_.metric, t, g.coord(i, j, k));
    } catch (const HyperbolicityError&) {
      bad.store(true, std::memory_order_relaxed);
      continue;
    }
    if (std::abs(s.g_inv[0][0]) < 1e-10) {
      bad.store(true, std::memory_order_relaxed);
      continue;
    }
    double* co = &cyl_coeffs_[static_cast<std::size_t>(q) * kCoeffsPerNode];
    co[0] = s.g_inv[0][0];
    co[1] = s.g_inv[0][1];
    co[2] = s.g_inv[0][2];
    co[3] = s.g_inv[0][3];
    co[4] = s.g_inv[1][1];
    co[5] = s.g_inv[2][2];
    co[6] = s.g_inv[3][3];
    co[7] = s.g_inv[1][2];
    co[8] = s.g_inv[1][3];
    co[9] = s.g_inv[2][3];
    co[10] = s.b[0];
    co[11] = s.b[1];
    co[12] = s.b[2];
    co[13] = s.b[3];
  }
  if (bad.load())
    throw HyperbolicityError(
        "rhs: metric degenerate or |g^00| below hyperbolicity threshold");
}

void WaveSolver::rhs(const std::vector<double>& phi,
                     const std::vector<double>& pi, double t_stage,
                     const std::vector<double>* source,
                     bool use_nonlinearity, std::vector<double>& dphi,
                     std::vector<double>& dpi) const {
  const Grid& g = par_.grid;
  const int n = g.n;
  const double h = g.h;
  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);
  const double inv4h2 = 1.0 / (4.0 * h * h);
  dphi.assign(g.size(), 0.0);
  dpi.assign(g.size(), 0.0);

  StageMetric sm;
  if (!cyl_nodes_.empty()) eval_stage_metric(t_stage, sm);

  const bool nl = use_nonlinearity && cfg_.nullform.enabled;
  const Mat4& A = cfg_.nullform.A;
  const double kappa = cfg_.nullform.kappa;
  const std::ptrdiff_t s1 = 1, s2 = n,
                       s3 = static_cast<std::ptrdiff_t>(n) * n;
  const double* P = phi.data();
  const double* Q = pi.data();
  const double* S = source ? source->data() : nullptr;

#pragma omp parallel for schedule(static)
  for (int k = 2; k <= n - 3; ++k)
    for (int j = 2; j <= n - 3; ++j)
      for (int i = 2; i <= n - 3; ++i) {
        const std::size_t c = g.idx(i, j, k);
        const double pc = P[c];
        const double dxx = (P[c + s1] - 2.0 * pc + P[c - s1]) * invh2;
        const double dyy = (P[c + s2] - 2.0 * pc + P[c - s2]) * invh2;
        const double dzz = (P[c + s3] - 2.0 * pc + P[c - s3]) * invh2;
        const double gx = (P[c + s1] - P[c - s1]) * inv2h;
        const double gy = (P[c + s2] - P[c - s2]) * inv2h;
        const double gz = (P[c + s3] - P[c - s3]) * inv2h;
        const double qc = Q[c];

        double F = 0.0;
        if (nl) {
          const double d[4] = {qc, gx, gy, gz};
          double acc = 0.0;
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) acc += A[a][b] * d[a] * d[b];
          F = acc + kappa * pc * pc * pc;
        }
        if (S) F += S[c];

        const int ci = cyl_index_[c];
        double out;
        if (ci < 0) {
          out = (dxx + dyy + dzz) - F;
        } else {
          const double dxy = (P[c + s1 + s2] - P[c + s1 - s2] -
                              P[c - s1 + s2] + P[c - s1 - s2]) * inv4h2;
          const double dxz = (P[c + s1 + s3] - P[c + s1 - s3] -
                              P[c - s1 + s3] + P[c - s1 - s3]) * inv4h2;
          const double dyz = (P[c + s2 + s3] - P[c + s2 - s3] -
                              P[c - s2 + s3] + P[c - s2 - s3]) * inv4h2;
          const double px = (Q[c + s1] - Q[c - s1]) * inv2h;
          const double py = (Q[c + s2] - Q[c - s2]) * inv2h;
          const double pz = (Q[c + s3] - Q[c - s3]) * inv2h;
          const double* co =
              &cyl_coeffs_[static_cast<std::size_t>(ci) * kCoeffsPerNode];
          const double spatial = co[4] * dxx + co[5] * dyy + co[6] * dzz +
                                 2.0 * (co[7] * dxy + co[8] * dxz +
                                        co[9] * dyz);
          const double mixed = 2.0 * (co[1] * px + co[2] * py + co[3] * pz);
          const double drift = co[10] * qc + co[11] * gx + co[12] * gy +
                               co[13] * gz;
          out = (F - spatial - mixed - drift) / co[0];
        }
        dphi[c] = qc;
        dpi[c] = out;
      }
}

FieldState WaveSolver::step_rk4(const FieldState& st,
                                const std::vector<double>* source_lo,
                                const std::vector<double>* source_mid,
                                const std::vector<double>* source_hi) const {
  const Grid& g = par_.grid;
  const double dt = par_.dt;
  const std::size_t N = g.size();

  static thread_local std::vector<double> kphi, kpi, sphi, spi, aphi, api;
  kphi.resize(N);
  kpi.resize(N);
  sphi.resize(N);
  spi.resize(N);
  aphi.resize(N);
  api.resize(N);

  const double t0 = st.t;
  // Stage 1.
  rhs(st.phi, st.pi, t0, source_lo, true, kphi, kpi);
  for (std::size_t c = 0; c < N; ++c) {
    aphi[c] = st.phi[c] + dt / 6.0 * kphi[c];
    api[c] = st.pi[c] + dt / 6.0 * kpi[c];
    sphi[c] = st.phi[c] + 0.5 * dt * kphi[c];
    spi[c] = st.pi[c] + 0.5 * dt * kpi[c];
  }
  // Stage 2.
  rhs(sphi, spi, t0 + 0.5 * dt, source_mid, true, kphi, kpi);
  for (std::size_t c = 0; c < N; ++c) {
    aphi[c] += dt / 3.0 * kphi[c];
    api[c] += dt / 3.0 * kpi[c];
    sphi[c] = st.phi[c] + 0.5 * dt * kphi[c];
    spi[c] = st.pi[c] + 0.5 * dt * kpi[c];
  }
  // Stage 3.
  rhs(sphi, spi, t0 + 0.5 * dt, source_mid, true, kphi, kpi);
  for (std::size_t c = 0; c < N; ++c) {
    aphi[c] += dt / 3.0 * kphi[c];
    api[c] += dt / 3.0 * kpi[c];
    sphi[c] = st.phi[c] + dt * kphi[c];
    spi[c] = st.pi[c] + dt * kpi[c];
  }
  // Stage 4.
  rhs(sphi, spi, t0 + dt, source_hi, true, kphi, kpi);
  FieldState out(g);
  out.t = t0 + dt;
  for (std::size_t c = 0; c < N; ++c) {
    out.phi[c] = aphi[c] + dt / 6.0 * kphi[c];
    out.pi[c] = api[c] + dt / 6.0 * kpi[c];
  }
  // Boundary contract: the outer two shells stay identically zero.
  const int n = g.n;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        if (i >= 2 && i <= n - 3 && j >= 2 && j <= n - 3 && k >= 2 &&
            k <= n - 3)
          continue;
        const std::size_t c = g.idx(i, j, k);
        out.phi[c] = 0.0;
        out.pi[c] = 0.0;
      }
  return out;
}

double WaveSolver::manufactured_phi(double t, const Vec3& x) const {
  const double R = cfg_.metric.R;
  return std::cos(t) * bump(norm3(x) / R);
}

double WaveSolver::manufactured_pi(double t, const Vec3& x) const {
  const double R = cfg_.metric.R;
  return -std::sin(t) * bump(norm3(x) / R);
}

void WaveSolver::fill_manufactured_source(double t,
                                          std::vector<double>& src) const {
  const Grid& g = par_.grid;
  const int n = g.n;
  const double R = cfg_.metric.R;
  const double R2 = R * R;
  const double ct = std::cos(t), st = std::sin(t);
  const bool nl = cfg_.nullform.enabled;
  const Mat4& A = cfg_.nullform.A;
  const double kappa = cfg_.nullform.kappa;

  if (src.size() != g.size()) src.assign(g.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0;
       q < static_cast<std::ptrdiff_t>(source_nodes_.size()); ++q) {
    const std::size_t c = source_nodes_[q];
    const int i = static_cast<int>(c % n);
    const int j = static_cast<int>((c / n) % n);
    const int kk = static_cast<int>(c / (static_cast<std::size_t>(n) * n));
    const Vec3 x = g.coord(i, j, kk);
    const double r = norm3(x);
    const double s = r / R;
    const double B = bump(s), W = bump_w(s), V = bump_v(s);

    const double phi = ct * B;
    const double dtphi = -st * B;
    const double dttphi = -ct * B;
    Vec3 dphi, dtdphi;
    double hess[3][3];
    for (int a = 0; a < 3; ++a) {
      dphi[a] = ct * W * x[a] / R2;
      dtdphi[a] = -st * W * x[a] / R2;
      for (int b = 0; b < 3; ++b) {
        const double del = (a == b) ? 1.0 : 0.0;
        hess[a][b] = ct * (V * x[a] * x[b] / (R2 * R2) + W * del / R2);
      }
    }

    const MetricSample m = eval_metric(cfg_.metric, t, x);
    double box = m.g_inv[0][0] * dttphi + m.b[0] * dtphi;
    for (int a = 0; a < 3; ++a) {
      box += 2.0 * m.g_inv[0][a + 1] * dtdphi[a] + m.b[a + 1] * dphi[a];
      for (int b = 0; b < 3; ++b)
        box += m.g_inv[a + 1][b + 1] * hess[a][b];
    }

    double F = 0.0;
    if (nl) {
      const double d[4] = {dtphi, dphi[0], dphi[1], dphi[2]};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) F += A[a][b] * d[a] * d[b];
      F += kappa * phi * phi * phi;
    }
    src[c] = box - F;
  }
}

FieldState WaveSolver::initial_data() const {
  const Grid& g = par_.grid;
  if (cfg_.manufactured == ManufacturedId::cos_bump) {
    FieldState st(g);
    for (int k = 0; k < g.n; ++k)
      for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
          const Vec3 x = g.coord(i, j, k);
          st.phi[g.idx(i, j, k)] = manufactured_phi(0.0, x);
          st.pi[g.idx(i, j, k)] = manufactured_pi(0.0, x);
        }
    return st;
  }
  return make_initial_data(g, cfg_.epsilon, cfg_.profile, cfg_.metric.R,
                           cfg_.sigma);
}

bool WaveSolver::ring_stores_F() const { return cfg_.store_F_in_ring; }

void WaveSolver::commit_ring_entry(int step) {
  RingEntry e;
  e.t = state_.t;
  e.step = step;
  e.phi = state_.phi;
  e.pi = state_.pi;
  e.grad = spatial_gradient(state_.phi, par_.grid);
  if (cfg_.store_F_in_ring) {
    NullFormSpec nf = cfg_.nullform;
    e.F = eval_F(nf, state_.pi, e.grad, state_.phi);
    e.gradF = spatial_gradient(e.F, par_.grid);
  }
  ring_.push_back(std::move(e));
  while (static_cast<int>(ring_.size()) > std::max(3, cfg_.ring_depth))
    ring_.pop_front();
}

EvolutionRecord WaveSolver::run(const StepHook& hook) {
  return run(initial_data(), hook);
}

EvolutionRecord WaveSolver::run(FieldState initial, const StepHook& hook) {
  const Grid& g = par_.grid;
  EvolutionRecord rec;
  state_ = std::move(initial);
  state_.t = 0.0;
  ring_.clear();

  std::vector<double> src_lo, src_mid, src_hi;
  const bool manuf = cfg_.manufactured != ManufacturedId::none;
  if (manuf) {
    src_lo.assign(g.size(), 0.0);
    src_mid.assign(g.size(), 0.0);
    src_hi.assign(g.size(), 0.0);
  }

  commit_ring_entry(0);
  if (hook) hook(*this, 0);

  const int n = g.n;
  auto shell_max = [&](int sh) {
    double m = 0.0;
    const int lo = sh, hi = n - 1 - sh;
    for (int kk = lo; kk <= hi; ++kk)
      for (int jj = lo; jj <= hi; ++jj) {
        m = std::max(m, std::abs(state_.phi[g.idx(lo, jj, kk)]));
        m = std::max(m, std::abs(state_.phi[g.idx(hi, jj, kk)]));
      }
    for (int kk = lo; kk <= hi; ++kk)
      for (int ii = lo; ii <= hi; ++ii) {
        m = std::max(m, std::abs(state_.phi[g.idx(ii, lo, kk)]));
        m = std::max(m, std::abs(state_.phi[g.idx(ii, hi, kk)]));
      }
    for (int jj = lo; jj <= hi; ++jj)
      for (int ii = lo; ii <= hi; ++ii) {
        m = std::max(m, std::abs(state_.phi[g.idx(ii, jj, lo)]));
        m = std::max(m, std::abs(state_.phi[g.idx(ii, jj, hi)]));
      }
    return m;
  };

  const int record_every = std::max(1, par_.steps / 200);
  rec.max_phi_overall = max_abs(state_.phi);
  rec.max_phi_series.emplace_back(0.0, rec.max_phi_overall);
  for (int step = 1; step <= par_.steps; ++step) {
    if (manuf) {
      const double t0 = state_.t;
      fill_manufactured_source(t0, src_lo);
      fill_manufactured_source(t0 + 0.5 * par_.dt, src_mid);
      fill_manufactured_source(t0 + par_.dt, src_hi);
      state_ = step_rk4(state_, &src_lo, &src_mid, &src_hi);
    } else {
      state_ = step_rk4(state_);
    }

    double mphi = 0.0;
    bool finite = true;
    for (double v : state_.phi) {
      if (!std::isfinite(v)) {
        finite = false;
        break;
      }
      mphi = std::max(mphi, std::abs(v));
    }
    if (finite)
      for (double v : state_.pi)
        if (!std::isfinite(v)) {
          finite = false;
          break;
        }
    rec.max_phi_overall = std::max(rec.max_phi_overall, mphi);

    if (!finite || mphi > cfg_.blowup_threshold) {
      rec.status = RunStatus::nan_abort;
      rec.abort_step = step;
      rec.steps_taken = step;
      rec.t_end = state_.t;
      rec.max_phi_final = finite ? mphi : std::numeric_limits<double>::infinity();
      if (cfg_.log_every > 0)
        std::printf("step=%d t=%.17g max_phi=%.17g status=%s\n", step,
                    state_.t, rec.max_phi_final,
                    to_string(rec.status).c_str());
      return rec;
    }

    commit_ring_entry(step);
    if (hook) hook(*this, step);

    if (step % record_every == 0)
      rec.max_phi_series.emplace_back(state_.t, mphi);
    if (cfg_.log_every > 0 && (step % cfg_.log_every == 0))
      std::printf("step=%d t=%.17g max_phi=%.17g status=running\n", step,
                  state_.t, mphi);

    if (shell_max(2) > cfg_.breach_threshold) {
      rec.status = RunStatus::boundary_breach;
      rec.abort_step = step;
      rec.steps_taken = step;
      rec.t_end = state_.t;
      rec.max_phi_final = mphi;
      if (cfg_.log_every > 0)
        std::printf("step=%d t=%.17g max_phi=%.17g status=%s\n", step,
                    state_.t, mphi, to_string(rec.status).c_str());
      return rec;
    }
  }

  rec.status = RunStatus::completed;
  rec.steps_taken = par_.steps;
  rec.t_end = state_.t;
  rec.max_phi_final = max_abs(state_.phi);
  if (cfg_.log_every > 0)
    std::printf("step=%d t=%.17g max_phi=%.17g status=%s\n", par_.steps,
                state_.t, rec.max_phi_final, to_string(rec.status).c_str());
  return rec;
}

PicardRecord picard_run(const SolverConfig& cfg_in) {
  SolverConfig cfg = cfg_in;
  if (cfg.mode != RunMode::picard)
    throw std::invalid_argument("picard_run: mode must be picard");
  if (cfg.picard_iterations < 1)
    throw std::invalid_argument("picard_run: need at least one iterate");

  cfg.mode = RunMode::direct;  // each iterate is a plain linear run
  WaveSolver probe(cfg);
  const Grid& g = probe.grid();
  const int steps = probe.params().steps;

  const double bytes_per_array = static_cast<double>(g.size()) * 8.0;
  // Two generations of per-step source history plus two generations of
  // per-leaf snapshots stay resident.
  const double history_bytes =
      bytes_per_array * 2.0 * (steps + 1) +
      bytes_per_array * 2.0 * probe.params().snapped_schedule.size();
  if (history_bytes > cfg.history_budget_mb * 1024.0 * 1024.0)
    throw HistoryBudgetError(
        "picard_run: source history exceeds the configured budget");

  const auto& leaves = probe.params().snapped_schedule;
  PicardRecord out;

  std::vector<std::vector<double>> F_hist(steps + 1);
  std::vector<std::vector<double>> F_next(steps + 1);
  std::vector<std::vector<double>> prev_leafphi, cur_leafphi;

  NullFormSpec nf = cfg.nullform;
  for (int iter = 0; iter < cfg.picard_iterations; ++iter) {
    SolverConfig c = cfg;
    c.nullform.enabled = false;  // the nonlinearity enters via the source
    WaveSolver solver(c);
    cur_leafphi.assign(leaves.size(), {});

    std::vector<double> src_lo, src_mid, src_hi;
    const bool have_hist = iter > 0;

    FieldState st = solver.initial_data();
    // Record F of the current iterate and leaf snapshots as we go.
    auto record = [&](const FieldState& s, int step) {
      GradientField gr = spatial_gradient(s.phi, g);
      F_next[step] = eval_F(nf, s.pi, gr, s.phi);
      for (std::size_t li = 0; li < leaves.size(); ++li)
        if (std::abs(leaves[li] - s.t) < 0.5 * solver.dt())
          cur_leafphi[li] = s.phi;
    };

    record(st, 0);
    EvolutionRecord rec;
    rec.max_phi_overall = max_abs(st.phi);
    FieldState cur = st;
    for (int step = 1; step <= steps; ++step) {
      const std::vector<double>* lo = nullptr;
      const std::vector<double>* mid = nullptr;
      const std::vector<double>* hi = nullptr;
      if (have_hist) {
        src_lo = F_hist[step - 1];
        src_hi = F_hist[step];
        src_mid.resize(src_lo.size());
        for (std::size_t q = 0; q < src_lo.size(); ++q)
          src_mid[q] = 0.5 * (src_lo[q] + src_hi[q]);
        lo = &src_lo;
        mid = &src_mid;
        hi = &src_hi;
      }
      cur = solver.step_rk4(cur, lo, mid, hi);
      if (!all_finite(cur.phi) || !all_finite(cur.pi)) {
        rec.status = RunStatus::nan_abort;
        rec.abort_step = step;
        break;
      }
      rec.max_phi_overall = std::max(rec.max_phi_overall, max_abs(cur.phi));
      record(cur, step);
    }
    rec.steps_taken = steps;
    rec.t_end = cur.t;
    rec.max_phi_final = max_abs(cur.phi);
    out.runs.push_back(rec);

    if (iter > 0) {
      double inc = 0.0;
      for (std::size_t li = 0; li < leaves.size(); ++li) {
        if (prev_leafphi[li].empty() || cur_leafphi[li].empty()) continue;
        for (std::size_t q = 0; q < cur_leafphi[li].size(); ++q)
          inc = std::max(inc,
                         std::abs(cur_leafphi[li][q] - prev_leafphi[li][q]));
      }
      out.increments.push_back(inc);
    }
    prev_leafphi = cur_leafphi;
    F_hist.swap(F_next);
    if (iter == cfg.picard_iterations - 1) out.final_states.push_back(cur);
  }
  return out;
}

}  // namespace nlwave
