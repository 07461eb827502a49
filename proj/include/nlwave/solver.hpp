#ifndef NLWAVE_SOLVER_HPP
#define NLWAVE_SOLVER_HPP

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlwave/grid.hpp"
#include "nlwave/metric.hpp"
#include "nlwave/nullform.hpp"

namespace nlwave {

enum class RunStatus { completed, nan_abort, boundary_breach };
enum class RunMode { direct, picard };
enum class ManufacturedId { none, cos_bump };

struct HistoryBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string to_string(RunStatus s);

struct SolverConfig {
  // Grid / stepping.
  int n = 97;
  double cfl = 0.25;
  double t_max = 3.0;
  // Optional explicit half-width of the computational cube; when <= 0 the
  // minimal valid domain R + c_max*t_max + 4h is used. Must satisfy
  // R_dom >= R + c_max*t_max + 2h.
  double domain_radius = 0.0;

  // Physics.
  MetricSpec metric;
  NullFormSpec nullform;
  double lambda = 0.9;  // hyperbolicity level to certify before running
  double alpha = 0.5;
  double epsilon = 0.01;
  Profile profile = Profile::compact_bump;
  double sigma = -1.0;

  // Diagnostics schedule (leaf times tau; snapped to step multiples).
  std::vector<double> schedule;

  RunMode mode = RunMode::direct;
  int picard_iterations = 3;
  ManufacturedId manufactured = ManufacturedId::none;

  int log_every = 0;  // progress lines every k steps; 0 = quiet
  int ring_depth = 3;
  double blowup_threshold = 1e6;
  double breach_threshold = 1e-10;
  double history_budget_mb = 512.0;
  bool store_F_in_ring = false;  // forced on when nonlinearity is enabled
};

// Derived quantities fixed at solver construction.
struct DerivedParams {
  Grid grid;
  double dt = 0.0;
  double c_max = 1.0;
  double lambda1 = 1.0;
  int steps = 0;
  std::vector<double> snapped_schedule;
};

struct EvolutionRecord {
  RunStatus status = RunStatus::completed;
  int steps_taken = 0;
  int abort_step = -1;
  double t_end = 0.0;
  double max_phi_overall = 0.0;
  double max_phi_final = 0.0;
  std::vector<std::pair<double, double>> max_phi_series;  // (t, max|phi|)
};

// One committed time level plus the derived arrays diagnostics consume.
struct RingEntry {
  double t = 0.0;
  int step = 0;
  std::vector<double> phi, pi;
  GradientField grad;          // centered gradient of phi
  std::vector<double> F;       // nonlinearity at this level (may be empty)
  GradientField gradF;         // filled only when monitors need it
};

class WaveSolver {
 public:
  explicit WaveSolver(const SolverConfig& cfg);

  const SolverConfig& config() const { return cfg_; }
  const DerivedParams& params() const { return par_; }
  const Grid& grid() const { return par_.grid; }
  double dt() const { return par_.dt; }

  // Exact manufactured solution and the source it requires.
  double manufactured_phi(double t, const Vec3& x) const;
  double manufactured_pi(double t, const Vec3& x) const;

  // Semi-discrete right-hand side at a given stage time; exposed for the
  // operator-level tests. source may be null.
  void rhs(const std::vector<double>& phi, const std::vector<double>& pi,
           double t_stage, const std::vector<double>* source,
           bool use_nonlinearity, std::vector<double>& dphi,
           std::vector<double>& dpi) const;

  // One classical RK4 step from the given state (metric re-evaluated at the
  // stage times). Used directly by tests; run() loops it.
  FieldState step_rk4(const FieldState& st,
                      const std::vector<double>* source_lo = nullptr,
                      const std::vector<double>* source_mid = nullptr,
                      const std::vector<double>* source_hi = nullptr) const;

  using StepHook = std::function<void(const WaveSolver&, int step)>;

  // Advances initial data to t_max, maintaining the snapshot ring and
  // invoking the hook after every committed step.
  EvolutionRecord run(FieldState initial, const StepHook& hook = nullptr);
  EvolutionRecord run(const StepHook& hook = nullptr);

  // Ring access for diagnostics (most recent last).
  const std::deque<RingEntry>& ring() const { return ring_; }
  bool ring_stores_F() const;
  const FieldState& state() const { return state_; }

  FieldState initial_data() const;

 private:
  struct StageMetric;
  void build_cylinder_cache();
  void eval_stage_metric(double t, StageMetric& m) const;
  void fill_manufactured_source(double t, std::vector<double>& src) const;
  void commit_ring_entry(int step);

  SolverConfig cfg_;
  DerivedParams par_;
  FieldState state_;
  std::deque<RingEntry> ring_;

  // Nodes inside the metric support cylinder (plus margin) and scratch
  // space for their coefficient values at a stage time.
  std::vector<std::size_t> cyl_nodes_;
  std::vector<int> cyl_index_;  // node -> position in cyl_nodes_, or -1
  mutable std::vector<double> cyl_coeffs_;  // 14 values per cylinder node
  std::vector<std::size_t> source_nodes_;   // manufactured-source support
};

struct PicardRecord {
  std::vector<EvolutionRecord> runs;
  std::vector<double> increments;  // sup over grid x schedule per iteration
  std::vector<FieldState> final_states;
};

// Recursive linear solves with the source read from the previous iterate's
// stored history. Iterate 0 has a vanishing source.
PicardRecord picard_run(const SolverConfig& cfg);

}  // namespace nlwave

#endif
