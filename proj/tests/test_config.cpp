#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nlwave/config.hpp"
#include "nlwave/runner.hpp"

using namespace nlwave;

namespace {

const char* kExample = R"(
# demo experiment
[metric]
family = "oscillating_bump"
amplitude = 0.01           # dimensionless
shift_amplitude = 0.002
omega = 1.5
phase = [0.1, 0.9, 1.7]
R = 2.0
lambda = 0.9
alpha = 0.5

[solver]
n = 49
cfl = 0.25
t_max = 6.0
epsilon = 0.01
profile = "compact_bump"

[nonlinearity]
enabled = true
A = [1, 0, 0, 0,  0, -1, 0, 0,  0, 0, -1, 0,  0, 0, 0, -1]
kappa = 0.0

[schedule]
gamma = 2.0
uniform = [2.5, 3.5]

[output]
directory = "demo_out"
seed = 777
tol_h = 0.05
)";

}  // namespace

TEST_CASE("toml parsing and schema") {
  const ExperimentConfig cfg =
      ExperimentConfig::from_table(TomlTable::parse_string(kExample));
  CHECK(cfg.metric.family == MetricFamily::oscillating_bump);
  CHECK(cfg.metric.amplitude == doctest::Approx(0.01));
  CHECK(cfg.metric.phase[2] == doctest::Approx(1.7));
  CHECK(cfg.solver.n == 49);
  CHECK(cfg.solver.nullform.enabled);
  CHECK(cfg.solver.nullform.A[1][1] == doctest::Approx(-1.0));
  CHECK(cfg.seed == 777);
  // Dyadic part merged with the uniform leaves: 2, 2.5, 3.5, 4 (= t_max - R).
  REQUIRE(cfg.solver.schedule.size() == 4);
  CHECK(cfg.solver.schedule[0] == doctest::Approx(2.0));
  CHECK(cfg.solver.schedule[3] == doctest::Approx(4.0));
}

TEST_CASE("unknown keys and sections are hard errors") {
  CHECK_THROWS_AS(ExperimentConfig::from_table(TomlTable::parse_string(
                      "[metric]\nfamly = \"minkowski\"\n")),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_table(
                      TomlTable::parse_string("[metrics]\nR = 1\n")),
                  ConfigError);
}

TEST_CASE("parse errors carry a location") {
  try {
    TomlTable::parse_string("[solver]\nn 49\n", "demo.toml");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("demo.toml:2") != std::string::npos);
  }
}

TEST_CASE("serialization round-trips losslessly") {
  const ExperimentConfig cfg =
      ExperimentConfig::from_table(TomlTable::parse_string(kExample));
  const std::string toml = cfg.to_toml();
  const ExperimentConfig back =
      ExperimentConfig::from_table(TomlTable::parse_string(toml));
  CHECK(back.to_toml() == toml);
  CHECK(back.hash() == cfg.hash());
  CHECK(back.metric.amplitude == cfg.metric.amplitude);
  CHECK(back.solver.schedule.size() == cfg.solver.schedule.size());
}

TEST_CASE("hash is sensitive to content") {
  ExperimentConfig a =
      ExperimentConfig::from_table(TomlTable::parse_string(kExample));
  ExperimentConfig b = a;
  b.solver.epsilon *= 2.0;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("diagnostics csv round-trip") {
  std::vector<LeafDiagnostics> rows(2);
  rows[0].tau = 2.0;
  rows[0].E_interior = 0.25;
  rows[0].E_null = 0.5;
  rows[0].E_total = 0.75;
  rows[0].null_complete = true;
  rows[0].hardy_defined = true;
  rows[0].hardy_ratio = 1.25;
  rows[1].tau = 4.0;
  rows[1].hardy_defined = false;
  const std::string path = "csv_roundtrip_test.csv";
  write_diagnostics_csv(path, rows);
  const auto back = read_diagnostics_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].tau == doctest::Approx(2.0));
  CHECK(back[0].E_total == doctest::Approx(0.75));
  CHECK(back[0].null_complete);
  CHECK(back[0].hardy_ratio == doctest::Approx(1.25));
  CHECK_FALSE(back[1].hardy_defined);
  std::remove(path.c_str());
}
