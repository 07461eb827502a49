#ifndef NLWAVE_FOLIATION_HPP
#define NLWAVE_FOLIATION_HPP

#include <map>
#include <optional>
#include <vector>

#include "nlwave/decay.hpp"
#include "nlwave/indexsets.hpp"
#include "nlwave/multiplier.hpp"
#include "nlwave/solver.hpp"
#include "nlwave/sphere.hpp"

namespace nlwave {

// Trapezoid-in-time accumulator for cone and band integrals; monotone for
// nonnegative integrands.
struct TrapezoidAcc {
  double sum = 0.0;
  double prev = 0.0;
  bool started = false;
  void add(double value, double dt) {
    if (started) sum += 0.5 * dt * (prev + value);
    prev = value;
    started = true;
  }
};

// Per-leaf energy split: spacelike disk {t = tau, r <= R} plus the running
// outgoing-cone accumulation (truncated at the current sim time).
struct EnergyBreakdown {
  double tau = 0.0;
  double interior = 0.0;
  double null_truncated = 0.0;
  bool null_complete = false;
  double E_total = 0.0;
};

// Full per-leaf diagnostics row.
struct LeafDiagnostics {
  double tau = 0.0;
  double E_interior = 0.0;
  double E_null = 0.0;
  double E_total = 0.0;
  bool null_complete = false;
  double p1_flux = 0.0;
  double p2ma_flux = 0.0;
  double D_cum = 0.0;
  double max_phi_inner = 0.0;
  double max_phi_outer_weighted = 0.0;
  double E_T = 0.0;
  double E_Omega = 0.0;
  double hardy_ratio = 0.0;
  bool hardy_defined = false;

  // Companion quantities for the inequality checks.
  double hardy_lhs = 0.0;
  double psi_side = 0.0;        // int (d_v psi)^2 + |angular psi|^2 dv dom
  double phi_side = 0.0;        // int ((d_v phi)^2 + |ang phi|^2) r^2 dv dom
  double lemma1_max = 0.0;      // max over the cone of r * int phi^2 dom
  double source_r3ma = 0.0;     // int int |F|^2 r^{3-alpha} from this leaf on
  double monitor_interior = 0.0;  // sum_{A cap depth} int_{r<=R} |O^k T^j F|^2
  double monitor_grad = 0.0;      // sum_{B cap depth} int_{r<=R} |grad ...|^2
};

struct CrossConeCheck {
  double v = 0.0;
  double lhs = 0.0;          // int (d_u psi)^2 dom du
  double flux_bound = 0.0;   // 2 * int J^T.n dsigma on the ingoing surface
  double boundary_term = 0.0;  // [int r phi^2 dom] at the two u-ends
  int samples = 0;
};

// Discrete balance of the r^p-weighted product identity between two leaves:
// cone(tau2) + bulk + = cone(tau1) + boundary(r=R) + source. All terms are
// accumulated during the run; residual_fraction = |imbalance| / max term.
struct PIdentityCheck {
  double p = 0.0;
  double tau1 = 0.0, tau2 = 0.0;
  double cone_tau1 = 0.0, cone_tau2 = 0.0;
  double bulk = 0.0;
  double boundary_R = 0.0;
  double source = 0.0;
  double residual_fraction() const;
};

struct DiagnosticsOptions {
  double R = 2.0;
  double alpha = 0.5;
  std::vector<double> leaves;
  int sphere_n_theta = 16;
  int sphere_n_phi = 32;
  bool commuted = true;       // accumulate E[T phi], E[Omega phi]
  bool monitors = false;      // nonlinearity monitors (needs F in ring)
  int monitor_k = 1, monitor_j = 1;
  std::vector<double> cross_cone_v;                  // ingoing surfaces to track
  std::vector<std::pair<double, double>> p_identity; // (tau1, tau2) pairs
  double p_identity_p = 0.0;
  bool track_ile = false;     // integrated-local-energy bookkeeping
};

// Consumes the solver ring after every committed step (one step of lag so
// centered time stencils exist) and owns every leaf/band accumulator.
class DiagnosticsEngine {
 public:
  DiagnosticsEngine(const Grid& grid, double dt, const DiagnosticsOptions& opt);

  // StepHook-compatible entry point.
  void on_step(const WaveSolver& solver, int step);
  // Core entry point: consumes the snapshot ring directly (testable without
  // a solver). stores_F marks rings that carry the nonlinearity arrays.
  void on_ring(const std::deque<RingEntry>& ring, bool stores_F, int step);

  std::vector<LeafDiagnostics> rows() const;
  DecaySeries series() const;
  EnergyBreakdown energy_flux(double tau) const;
  std::vector<CrossConeCheck> cross_cone() const;
  std::vector<PIdentityCheck> p_identity_checks() const;

  // D[F] over [tau1, tau2] (leaf-resolution windows).
  double D_norm(double tau1, double tau2) const;
  // Left side of the integrated-local-energy bound over [tau1, tau2] and
  // the companion bound C * (E_total(tau1) + D[F]) with C = (18 beta)^2.
  double ile_lhs(double tau1, double tau2) const;
  double ile_bound(double tau1, double tau2) const;

  const SphereSampling& sampling() const { return sph_; }

 private:
  struct Leaf;
  void process_center(const std::deque<RingEntry>& ring, bool stores_F);
  void leaf_interior(const std::deque<RingEntry>& ring, bool stores_F,
                     Leaf& lf);
  void leaf_cone(const std::deque<RingEntry>& ring, bool stores_F, Leaf& lf,
                 double t_c);
  void band_sweep(const std::deque<RingEntry>& ring, bool stores_F,
                  double t_c);
  void cross_cone_sweep(const std::deque<RingEntry>& ring, double t_c);

  Grid grid_;
  double dt_;
  DiagnosticsOptions opt_;
  SphereSampling sph_;
  CommutationIndex index_;

  struct Leaf {
    double tau = 0.0;
    bool interior_done = false;
    bool complete = false;
    double E_int = 0.0, hardy_int = 0.0;
    double max_in = 0.0, max_out_w = 0.0;
    double E_T_int = 0.0, E_Om_int = 0.0;
    double monitor_interior = 0.0, monitor_grad = 0.0;
    TrapezoidAcc flux, flux_T, flux_Om, p1, p2ma, hardy_cone, psi_side;
    double lemma1_max = 0.0;
  };
  std::vector<Leaf> leaves_;

  // tau'-banded accumulators (bucket b = interval [leaf_{b-1}, leaf_b)).
  std::vector<TrapezoidAcc> D_band_;
  std::vector<TrapezoidAcc> src_r3ma_band_;
  std::vector<TrapezoidAcc> ile_ext_band_;
  std::vector<double> D_interior_steps_;    // per-step interior D integrand
  std::vector<double> ile_interior_steps_;  // per-step interior ILE integrand
  std::vector<double> step_times_;

  struct PIdent {
    double tau1, tau2, p;
    TrapezoidAcc bulk, boundary_R, source;
    double cone1 = 0.0, cone2 = 0.0;
    bool cone1_set = false, cone2_set = false;
    TrapezoidAcc cone1_acc, cone2_acc;
  };
  std::vector<PIdent> pid_;

  struct Cross {
    double v;
    TrapezoidAcc lhs, flux;
    double first_boundary = 0.0, last_boundary = 0.0;
    bool started = false;
    int samples = 0;
  };
  std::vector<Cross> crossacc_;

  int last_processed_ = -1;
};

// Ratio of the weighted field square over Sigma_tau to the energy proxy;
// flagged undefined for zero-energy fields.
struct HardyResult {
  double ratio = 0.0;
  bool defined = false;
};
HardyResult hardy_check(const LeafDiagnostics& row);

// |psi-form flux - phi-form flux| against the bound 2 * E_total.
struct PsiPhiResult {
  double defect = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool defined = false;
};
PsiPhiResult psi_phi_equivalence(const LeafDiagnostics& row);

// Commutator diagnostics on the snapshot ring (time-centered at the middle
// entry). For X = T the residual is compared against the closed-form
// right-hand side; for X = Omega against zero outside the support cylinder
// and an H-proportional bound inside.
struct CommutatorResidual {
  double max_residual = 0.0;       // |LHS - RHS| over the grid interior
  double max_outside_support = 0.0;  // |LHS| outside r = R/2 + 2h
  double field_scale = 0.0;        // max |d^2 phi| + |d phi| for context
};
enum class CommuteField { T, Omega };
CommutatorResidual commutator_residual(const std::deque<RingEntry>& ring,
                                       const Grid& grid,
                                       const MetricSpec& metric,
                                       CommuteField X);

// E[Omega^k T^j phi](tau) from a ring centered at the leaf: interior part
// only (the cone part is accumulated by the engine for the configured set).
double commuted_interior_energy(const std::deque<RingEntry>& ring,
                                const Grid& grid, const SphereSampling& sph,
                                double R, int k, int j);

}  // namespace nlwave

#endif
