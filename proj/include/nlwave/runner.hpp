#ifndef NLWAVE_RUNNER_HPP
#define NLWAVE_RUNNER_HPP

#include <string>
#include <vector>

#include "nlwave/config.hpp"
#include "nlwave/decay.hpp"
#include "nlwave/foliation.hpp"
#include "nlwave/metric.hpp"
#include "nlwave/solver.hpp"

namespace nlwave {

// A validation or measurement failed a checked bound (CLI exit code 1, as
// opposed to unusable configs which exit 2).
struct CheckedFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string hypothesis_report_json(const HypothesisReport& rep);

void write_diagnostics_csv(const std::string& path,
                           const std::vector<LeafDiagnostics>& rows);
std::vector<LeafDiagnostics> read_diagnostics_csv(const std::string& path);

struct RunOutputs {
  EvolutionRecord record;
  std::vector<LeafDiagnostics> rows;
  DecayReport fit;
  PicardRecord picard;
  double wall_seconds = 0.0;
  std::string out_dir;
};

// Full pipeline: validate, run, persist diagnostics.csv + fit.json +
// manifest.json (+ optional final checkpoint) under the output directory.
RunOutputs run_experiment(const ExperimentConfig& cfg,
                          const std::string& out_override = "",
                          bool write_final_checkpoint = false);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double error = 0.0;
};
struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  std::vector<double> pair_orders;
  double ls_order = 0.0;
  double wall_seconds = 0.0;
};
// Manufactured-solution study at T = R over the given grid sizes.
ConvergenceResult convergence_study(const ExperimentConfig& base,
                                    const std::vector<int>& ns);

struct InequalityOutcome {
  int index = 0;
  bool skipped = false;  // zero-energy member
  double hardy_ratio = 0.0;
  double lemma1_ratio = 0.0;
  double psiphi_ratio = 0.0;
  bool pass = false;
};
struct InequalitySuite {
  std::vector<InequalityOutcome> outcomes;
  int failures = 0;
  int skipped = 0;
  double tol_h = 0.05;
};
// Seeded random compact fields evolved linearly; checks the weighted-field,
// spherical-average, and weighted-product equivalence bounds per leaf.
InequalitySuite inequality_corpus(const ExperimentConfig& cfg, int N);

struct BlowupContrast {
  bool null_certified = false;
  EvolutionRecord null_run;
  EvolutionRecord nonnull_run;
  double initial_max = 0.0;
  double null_growth = 0.0;     // max over run / initial max
  double nonnull_growth = 0.0;
  bool nonnull_blewup = false;
  std::string json;
};
BlowupContrast blowup_contrast(const ExperimentConfig& cfg);

}  // namespace nlwave

#endif
