#ifndef NLWAVE_CONFIG_HPP
#define NLWAVE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nlwave/solver.hpp"

namespace nlwave {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimal TOML reader covering the experiment-config schema: [section]
// headers, `key = value` with numbers, booleans, quoted strings, and flat
// arrays of numbers or strings. Comments start with '#'. Anything else is
// a hard error with a line number.
class TomlTable {
 public:
  static TomlTable parse_file(const std::string& path);
  static TomlTable parse_string(const std::string& text,
                                const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key,
                   double fallback) const;
  long long integer(const std::string& section, const std::string& key) const;
  long long integer_or(const std::string& section, const std::string& key,
                       long long fallback) const;
  bool boolean_or(const std::string& section, const std::string& key,
                  bool fallback) const;
  std::string text(const std::string& section, const std::string& key) const;
  std::string text_or(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  std::vector<double> numbers(const std::string& section,
                              const std::string& key) const;
  std::vector<double> numbers_or(const std::string& section,
                                 const std::string& key,
                                 const std::vector<double>& fallback) const;

  // Every (section, key) pair present in the file; used to reject unknown
  // keys against a schema.
  std::vector<std::pair<std::string, std::string>> entries() const;

 private:
  struct Value {
    enum class Kind { number, boolean, string, number_array, string_array };
    Kind kind;
    double num = 0.0;
    bool b = false;
    std::string str;
    std::vector<double> nums;
    std::vector<std::string> strs;
    int line = 0;
  };
  std::map<std::string, std::map<std::string, Value>> data_;
  std::string origin_;
  const Value& get(const std::string& section, const std::string& key) const;
};

struct ExperimentConfig {
  MetricSpec metric;
  double lambda = 0.9;
  int lattice_per_axis = 33;
  int lattice_temporal = 64;

  SolverConfig solver;  // metric/nullform copied in at load time

  double schedule_gamma = 0.0;  // 0 disables the dyadic part
  std::vector<double> schedule_uniform;

  std::string output_dir = "out";
  std::uint64_t seed = 12345;
  double tol_h = 0.05;
  double fit_tau_lo = 0.0, fit_tau_hi = 0.0;  // decay-fit window

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_table(const TomlTable& t);
  std::string to_toml() const;
  std::uint64_t hash() const;  // FNV-1a over the canonical serialization
};

}  // namespace nlwave

#endif
