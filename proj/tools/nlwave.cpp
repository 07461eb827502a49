#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "nlwave/runner.hpp"

using namespace nlwave;

namespace {

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CheckedFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlwave: semilinear wave simulator and estimate checker"};
  app.require_subcommand(1);

  std::string config_path, out_dir, csv_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  int corpus = 100;
  std::vector<int> grids = {49, 97, 193};
  double alpha = 0.5, tau_lo = 0.0, tau_hi = 0.0;
  bool final_checkpoint = false;

  auto add_common = [&](CLI::App* cmd, bool need_config = true) {
    if (need_config)
      cmd->add_option("--config", config_path, "experiment config (TOML)")
          ->required();
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; },
        "seed override");
    cmd->add_option("--threads", threads, "worker threads (0 = default)");
  };

  CLI::App* vm = app.add_subcommand("validate-metric",
                                    "check the structural hypotheses");
  add_common(vm);

  CLI::App* run = app.add_subcommand("run", "full simulation pipeline");
  add_common(run);
  run->add_flag("--checkpoint", final_checkpoint,
                "write a final-state checkpoint");

  CLI::App* chk = app.add_subcommand("check-inequalities",
                                     "seeded random-field inequality suite");
  add_common(chk);
  chk->add_option("--corpus", corpus, "number of random fields");

  CLI::App* conv = app.add_subcommand("convergence",
                                      "manufactured-solution order study");
  add_common(conv);
  conv->add_option("--grids", grids, "grid sizes (need at least three)");

  CLI::App* blow = app.add_subcommand("blowup-contrast",
                                      "null vs non-null growth comparison");
  add_common(blow);

  CLI::App* fit = app.add_subcommand("fit-decay",
                                     "fit decay exponents from a CSV");
  fit->add_option("csv", csv_path, "diagnostics.csv path")->required();
  fit->add_option("--alpha", alpha, "decay parameter alpha");
  fit->add_option("--tau-lo", tau_lo, "fit window lower edge");
  fit->add_option("--tau-hi", tau_hi, "fit window upper edge");

  CLI11_PARSE(app, argc, argv);
  set_threads(threads);

  auto load = [&]() {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    return cfg;
  };

  if (vm->parsed()) {
    return guarded([&]() {
      const ExperimentConfig cfg = load();
      const HypothesisReport rep =
          check_A1(cfg.metric, cfg.lambda,
                   {cfg.lattice_per_axis, cfg.lattice_temporal},
                   cfg.solver.alpha);
      const std::string json = hypothesis_report_json(rep);
      std::cout << json;
      std::cerr << "lattice: " << cfg.lattice_per_axis << "^3 x "
                << cfg.lattice_temporal << " samples\n";
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(out_dir + "/hypothesis.json") << json;
      }
      return rep.passed_A1 ? 0 : 1;
    });
  }

  if (run->parsed()) {
    return guarded([&]() {
      const ExperimentConfig cfg = load();
      const RunOutputs out = run_experiment(cfg, "", final_checkpoint);
      std::cout << "status=" << to_string(out.record.status)
                << " rows=" << out.rows.size() << " out=" << out.out_dir
                << "\n";
      return out.record.status == RunStatus::completed ? 0 : 1;
    });
  }

  if (chk->parsed()) {
    return guarded([&]() {
      const ExperimentConfig cfg = load();
      const InequalitySuite suite = inequality_corpus(cfg, corpus);
      std::printf("%-6s %-8s %-12s %-12s %-12s %s\n", "field", "status",
                  "hardy", "sph_avg", "psi_phi", "bounds");
      for (const auto& o : suite.outcomes) {
        if (o.skipped) {
          std::printf("%-6d %-8s %-12s %-12s %-12s\n", o.index, "skipped",
                      "-", "-", "-");
          continue;
        }
        std::printf("%-6d %-8s %-12.5g %-12.5g %-12.5g <= 6|1|1 x %.3g\n",
                    o.index, o.pass ? "pass" : "FAIL", o.hardy_ratio,
                    o.lemma1_ratio, o.psiphi_ratio, 1.0 + suite.tol_h);
      }
      std::printf("failures=%d skipped=%d\n", suite.failures, suite.skipped);
      return suite.failures == 0 ? 0 : 1;
    });
  }

  if (conv->parsed()) {
    return guarded([&]() {
      const ExperimentConfig cfg = load();
      const ConvergenceResult res = convergence_study(cfg, grids);
      std::printf("%-6s %-12s %-14s %s\n", "n", "h", "max_error", "order");
      for (std::size_t i = 0; i < res.rows.size(); ++i) {
        std::printf("%-6d %-12.6g %-14.6g", res.rows[i].n, res.rows[i].h,
                    res.rows[i].error);
        if (i > 0) std::printf(" %.3f", res.pair_orders[i - 1]);
        std::printf("\n");
      }
      std::printf("ls_order=%.3f wall=%.1fs\n", res.ls_order,
                  res.wall_seconds);
      return res.ls_order >= 1.9 ? 0 : 1;
    });
  }

  if (blow->parsed()) {
    return guarded([&]() {
      const ExperimentConfig cfg = load();
      const BlowupContrast bc = blowup_contrast(cfg);
      if (!bc.null_certified) {
        std::cerr << "blowup-contrast: configured form is not null; "
                     "refusing to label the comparison\n";
        return 1;
      }
      std::cout << bc.json;
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(out_dir + "/blowup_contrast.json") << bc.json;
      }
      return 0;
    });
  }

  if (fit->parsed()) {
    return guarded([&]() {
      const auto rows = read_diagnostics_csv(csv_path);
      DecaySeries s;
      for (const auto& r : rows) {
        s.tau.push_back(r.tau);
        s.E_total.push_back(r.E_total);
        s.E_interior.push_back(r.E_interior);
        s.max_phi_inner.push_back(r.max_phi_inner);
        s.max_phi_outer_weighted.push_back(r.max_phi_outer_weighted);
        s.E_T.push_back(r.E_T);
        s.E_Omega.push_back(r.E_Omega);
      }
      const DecayReport rep = fit_decay(s, alpha, tau_lo, tau_hi);
      std::cout << decay_report_json(rep);
      return 0;
    });
  }

  return 2;
}
