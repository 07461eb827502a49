#include "nlwave/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nlwave/bump.hpp"
#include "nlwave/checkpoint.hpp"

namespace nlwave {

namespace fs = std::filesystem;

std::string hypothesis_report_json(const HypothesisReport& rep) {
  std::ostringstream os;
  os.precision(12);
  os << "{\n";
  os << "  \"lambda\": " << rep.lambda << ",\n";
  os << "  \"H\": " << rep.H << ",\n";
  os << "  \"lambda1\": " << rep.lambda1 << ",\n";
  os << "  \"smallness_margin\": " << rep.smallness_margin << ",\n";
  os << "  \"passed_A1\": " << (rep.passed_A1 ? "true" : "false") << ",\n";
  os << "  \"alpha\": " << rep.alpha << "\n";
  os << "}\n";
  return os.str();
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<LeafDiagnostics>& rows) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "tau,E_interior,E_null,E_total,null_complete,p1_flux,p2ma_flux,"
        "D_cum,max_phi_inner,max_phi_outer_weighted,E_T,E_Omega,hardy_ratio\n";
  os.precision(12);
  for (const auto& r : rows) {
    os << r.tau << ',' << r.E_interior << ',' << r.E_null << ','
       << r.E_total << ',' << (r.null_complete ? 1 : 0) << ',' << r.p1_flux
       << ',' << r.p2ma_flux << ',' << r.D_cum << ',' << r.max_phi_inner
       << ',' << r.max_phi_outer_weighted << ',' << r.E_T << ',' << r.E_Omega
       << ',';
    if (r.hardy_defined)
      os << r.hardy_ratio;
    else
      os << "nan";
    os << '\n';
  }
}

std::vector<LeafDiagnostics> read_diagnostics_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("empty diagnostics csv");
  std::vector<LeafDiagnostics> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 13)
      throw std::runtime_error("diagnostics csv: bad row '" + line + "'");
    LeafDiagnostics r;
    r.tau = std::stod(f[0]);
    r.E_interior = std::stod(f[1]);
    r.E_null = std::stod(f[2]);
    r.E_total = std::stod(f[3]);
    r.null_complete = std::stoi(f[4]) != 0;
    r.p1_flux = std::stod(f[5]);
    r.p2ma_flux = std::stod(f[6]);
    r.D_cum = std::stod(f[7]);
    r.max_phi_inner = std::stod(f[8]);
    r.max_phi_outer_weighted = std::stod(f[9]);
    r.E_T = std::stod(f[10]);
    r.E_Omega = std::stod(f[11]);
    r.hardy_defined = f[12] != "nan";
    r.hardy_ratio = r.hardy_defined ? std::stod(f[12]) : 0.0;
    rows.push_back(r);
  }
  return rows;
}

namespace {

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp);
    os << content;
  }
  fs::rename(tmp, path);
}

std::string manifest_json(const ExperimentConfig& cfg, RunStatus status,
                          double wall_seconds,
                          const std::vector<std::string>& files) {
  std::ostringstream os;
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(cfg.hash()));
  os << "{\n";
  os << "  \"config_hash\": \"" << hex << "\",\n";
  os << "  \"code_version\": \"nlwave 1.0.0\",\n";
  os << "  \"wall_seconds\": " << wall_seconds << ",\n";
  os << "  \"status\": \"" << to_string(status) << "\",\n";
  os << "  \"files\": [";
  for (std::size_t i = 0; i < files.size(); ++i)
    os << "\"" << files[i] << "\"" << (i + 1 < files.size() ? ", " : "");
  os << "]\n}\n";
  return os.str();
}

DecaySeries series_from_rows(const std::vector<LeafDiagnostics>& rows) {
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
  return s;
}

}  // namespace

RunOutputs run_experiment(const ExperimentConfig& cfg,
                          const std::string& out_override,
                          bool write_final_checkpoint) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutputs out;
  out.out_dir = out_override.empty() ? cfg.output_dir : out_override;
  fs::create_directories(out.out_dir);

  // Validation gate: hyperbolicity plus a null certificate whenever the
  // nonlinearity is on (the plain run pipeline is the decay probe; the
  // blow-up contrast uses its own entry point).
  if (!cfg.metric.is_flat()) {
    const HypothesisReport rep =
        check_A1(cfg.metric, cfg.lambda,
                 {cfg.lattice_per_axis, cfg.lattice_temporal},
                 cfg.solver.alpha);
    if (!rep.passed_A1)
      throw CheckedFailure("run: metric fails the hyperbolicity check");
  }
  SolverConfig scfg = cfg.solver;
  if (scfg.nullform.enabled) {
    scfg.nullform.certificate = validate_null_condition(scfg.nullform.A);
    if (!scfg.nullform.certificate->is_null)
      throw CheckedFailure(
          "run: nonlinearity is enabled but its quadratic form is not null");
  }

  std::vector<std::string> files;
  if (scfg.mode == RunMode::picard) {
    scfg.mode = RunMode::picard;
    out.picard = picard_run(scfg);
    std::ostringstream os;
    os.precision(12);
    os << "{\n  \"iterations\": " << out.picard.runs.size()
       << ",\n  \"increments\": [";
    for (std::size_t i = 0; i < out.picard.increments.size(); ++i)
      os << out.picard.increments[i]
         << (i + 1 < out.picard.increments.size() ? ", " : "");
    os << "]\n}\n";
    atomic_write(out.out_dir + "/picard.json", os.str());
    files.push_back("picard.json");
    out.record = out.picard.runs.empty() ? EvolutionRecord{}
                                         : out.picard.runs.back();
  } else {
    WaveSolver solver(scfg);
    DiagnosticsOptions dopt;
    dopt.R = cfg.metric.R;
    dopt.alpha = scfg.alpha;
    dopt.leaves = solver.params().snapped_schedule;
    dopt.commuted = true;
    dopt.monitors = scfg.nullform.enabled;
    dopt.track_ile = scfg.nullform.enabled;
    DiagnosticsEngine engine(solver.grid(), solver.dt(), dopt);
    out.record = solver.run(
        [&engine](const WaveSolver& s, int step) { engine.on_step(s, step); });
    out.rows = engine.rows();

    write_diagnostics_csv(out.out_dir + "/diagnostics.csv", out.rows);
    files.push_back("diagnostics.csv");

    const DecaySeries series = series_from_rows(out.rows);
    out.fit = fit_decay(series, scfg.alpha, cfg.fit_tau_lo, cfg.fit_tau_hi);
    atomic_write(out.out_dir + "/fit.json", decay_report_json(out.fit));
    files.push_back("fit.json");

    if (write_final_checkpoint) {
      write_checkpoint(out.out_dir + "/final.nlwv", solver.grid(),
                       solver.state());
      files.push_back("final.nlwv");
    }
  }

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  atomic_write(out.out_dir + "/manifest.json",
               manifest_json(cfg, out.record.status, out.wall_seconds, files));
  return out;
}

ConvergenceResult convergence_study(const ExperimentConfig& base,
                                    const std::vector<int>& ns) {
  if (ns.size() < 3)
    throw ConfigError("convergence: need at least three grid sizes");
  const auto t0 = std::chrono::steady_clock::now();
  ConvergenceResult res;
  for (int n : ns) {
    SolverConfig scfg = base.solver;
    scfg.n = n;
    scfg.manufactured = ManufacturedId::cos_bump;
    scfg.mode = RunMode::direct;
    scfg.t_max = base.metric.R;
    scfg.schedule.clear();
    WaveSolver solver(scfg);
    const EvolutionRecord rec = solver.run();
    if (rec.status != RunStatus::completed)
      throw CheckedFailure("convergence: run did not complete");
    const Grid& g = solver.grid();
    double err = 0.0;
    for (int k = 0; k < g.n; ++k)
      for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
          const Vec3 x = g.coord(i, j, k);
          const double e = solver.state().phi[g.idx(i, j, k)] -
                           solver.manufactured_phi(scfg.t_max, x);
          err = std::max(err, std::abs(e));
        }
    res.rows.push_back({n, g.h, err});
  }
  for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) {
    const double num = std::log(res.rows[i].error / res.rows[i + 1].error);
    const double den = std::log(res.rows[i].h / res.rows[i + 1].h);
    res.pair_orders.push_back(num / den);
  }
  // Least-squares slope of log(error) against log(h).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : res.rows) {
    const double lx = std::log(r.h), ly = std::log(r.error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(res.rows.size());
  res.ls_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

InequalitySuite inequality_corpus(const ExperimentConfig& cfg, int N) {
  if (N < 1) throw ConfigError("check-inequalities: corpus size must be >= 1");
  InequalitySuite suite;
  suite.tol_h = cfg.tol_h;
  const double R = cfg.metric.R;

  for (int member = 0; member < N; ++member) {
    SolverConfig scfg = cfg.solver;
    scfg.nullform.enabled = false;
    scfg.manufactured = ManufacturedId::none;
    scfg.mode = RunMode::direct;
    scfg.t_max = 3.0 * R;
    scfg.schedule = {0.5 * R, R};
    WaveSolver solver(scfg);
    const Grid& g = solver.grid();

    // Seeded superposition of compact bumps with centers in r <= R/2 and
    // widths <= R/2, so the support stays inside r <= R.
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(member));
    std::uniform_int_distribution<int> n_bumps(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FieldState st(g);
    const int m = n_bumps(rng);
    for (int b = 0; b < m; ++b) {
      Vec3 c;
      double cr = 2.0;
      do {
        c = {R * (unit(rng) - 0.5), R * (unit(rng) - 0.5),
             R * (unit(rng) - 0.5)};
        cr = norm3(c);
      } while (cr > 0.5 * R);
      const double w = R * (0.4 + 0.1 * unit(rng));
      const double amp = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + unit(rng));
      for (int kk = 0; kk < g.n; ++kk)
        for (int jj = 0; jj < g.n; ++jj)
          for (int ii = 0; ii < g.n; ++ii) {
            const Vec3 x = g.coord(ii, jj, kk);
            const Vec3 d = {x[0] - c[0], x[1] - c[1], x[2] - c[2]};
            st.phi[g.idx(ii, jj, kk)] += amp * bump(norm3(d) / w);
          }
    }
    if (member % 2 == 1) {
      // Give half the corpus a kinetic component from a second superposition.
      for (int kk = 0; kk < g.n; ++kk)
        for (int jj = 0; jj < g.n; ++jj)
          for (int ii = 0; ii < g.n; ++ii) {
            const Vec3 x = g.coord(ii, jj, kk);
            st.pi[g.idx(ii, jj, kk)] =
                0.3 * st.phi[g.idx(ii, jj, kk)] * std::cos(x[0] / R);
          }
    }

    DiagnosticsOptions dopt;
    dopt.R = R;
    dopt.alpha = scfg.alpha;
    dopt.leaves = solver.params().snapped_schedule;
    dopt.commuted = false;
    DiagnosticsEngine engine(solver.grid(), solver.dt(), dopt);
    const EvolutionRecord rec = solver.run(std::move(st),
        [&engine](const WaveSolver& s, int step) { engine.on_step(s, step); });
    if (rec.status != RunStatus::completed)
      throw CheckedFailure("check-inequalities: corpus run did not complete");

    for (const auto& row : engine.rows()) {
      InequalityOutcome o;
      o.index = member;
      if (!(row.E_total > 0.0)) {
        o.skipped = true;
        ++suite.skipped;
        suite.outcomes.push_back(o);
        continue;
      }
      o.hardy_ratio = hardy_check(row).ratio;
      o.lemma1_ratio = row.lemma1_max / row.E_total;
      o.psiphi_ratio = psi_phi_equivalence(row).ratio;
      const double s = 1.0 + suite.tol_h;
      o.pass = o.hardy_ratio <= 6.0 * s && o.lemma1_ratio <= 1.0 * s &&
               o.psiphi_ratio <= 1.0 * s;
      if (!o.pass) ++suite.failures;
      suite.outcomes.push_back(o);
    }
  }
  return suite;
}

BlowupContrast blowup_contrast(const ExperimentConfig& cfg) {
  BlowupContrast bc;
  const NullCertificate cert = validate_null_condition(cfg.solver.nullform.A);
  bc.null_certified = cert.is_null;
  if (!bc.null_certified) return bc;

  SolverConfig null_cfg = cfg.solver;
  null_cfg.nullform.enabled = true;
  null_cfg.nullform.certificate = cert;
  null_cfg.mode = RunMode::direct;
  null_cfg.manufactured = ManufacturedId::none;
  null_cfg.schedule.clear();

  SolverConfig bad_cfg = null_cfg;
  bad_cfg.nullform.A = Mat4{};
  bad_cfg.nullform.A[0][0] = 1.0;  // F = (d_t phi)^2
  bad_cfg.nullform.kappa = 0.0;

  {
    WaveSolver s(null_cfg);
    FieldState init = s.initial_data();
    bc.initial_max = max_abs(init.phi);
    bc.null_run = s.run(std::move(init));
  }
  {
    WaveSolver s(bad_cfg);
    bc.nonnull_run = s.run();
  }
  const double base = std::max(bc.initial_max, 1e-300);
  bc.null_growth = bc.null_run.max_phi_overall / base;
  bc.nonnull_growth = bc.nonnull_run.max_phi_overall / base;
  bc.nonnull_blewup = bc.nonnull_run.status == RunStatus::nan_abort;

  std::ostringstream os;
  os.precision(12);
  auto series = [&](const EvolutionRecord& r) {
    std::ostringstream s2;
    s2.precision(12);
    s2 << "[";
    for (std::size_t i = 0; i < r.max_phi_series.size(); ++i)
      s2 << "[" << r.max_phi_series[i].first << ", "
         << r.max_phi_series[i].second << "]"
         << (i + 1 < r.max_phi_series.size() ? ", " : "");
    s2 << "]";
    return s2.str();
  };
  os << "{\n";
  os << "  \"initial_max\": " << bc.initial_max << ",\n";
  os << "  \"null\": {\"status\": \"" << to_string(bc.null_run.status)
     << "\", \"growth\": " << bc.null_growth
     << ", \"trajectory\": " << series(bc.null_run) << "},\n";
  os << "  \"nonnull\": {\"status\": \"" << to_string(bc.nonnull_run.status)
     << "\", \"growth\": " << bc.nonnull_growth
     << ", \"trajectory\": " << series(bc.nonnull_run) << "}\n";
  os << "}\n";
  bc.json = os.str();
  return bc;
}

}  // namespace nlwave
