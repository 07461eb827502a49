#include "nlwave/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlwave/decay.hpp"

namespace nlwave {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

}  // namespace

TomlTable TomlTable::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_string(ss.str(), path);
}

TomlTable TomlTable::parse_string(const std::string& textin,
                                  const std::string& origin) {
  TomlTable t;
  t.origin_ = origin;
  std::istringstream is(textin);
  std::string line, section;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail("empty section name");
      t.data_[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (val.empty()) fail("empty value for key '" + key + "'");
    if (t.data_[section].count(key)) fail("duplicate key '" + key + "'");

    Value v;
    v.line = lineno;
    if (val.front() == '[') {
      if (val.back() != ']') fail("unterminated array for key '" + key + "'");
      std::string body = val.substr(1, val.size() - 2);
      std::vector<std::string> toks;
      std::string cur;
      bool quoted = false;
      for (char ch : body) {
        if (ch == '"') quoted = !quoted;
        if (ch == ',' && !quoted) {
          toks.push_back(trim(cur));
          cur.clear();
        } else {
          cur.push_back(ch);
        }
      }
      if (!trim(cur).empty()) toks.push_back(trim(cur));
      bool all_nums = true;
      for (auto& tk : toks)
        if (!tk.empty() && tk.front() == '"') all_nums = false;
      if (all_nums) {
        v.kind = Value::Kind::number_array;
        for (auto& tk : toks) {
          double d;
          if (!parse_number(tk, d))
            fail("bad number '" + tk + "' in array '" + key + "'");
          v.nums.push_back(d);
        }
      } else {
        v.kind = Value::Kind::string_array;
        for (auto& tk : toks) {
          if (tk.size() < 2 || tk.front() != '"' || tk.back() != '"')
            fail("bad string in array '" + key + "'");
          v.strs.push_back(tk.substr(1, tk.size() - 2));
        }
      }
    } else if (val.front() == '"') {
      if (val.size() < 2 || val.back() != '"')
        fail("unterminated string for key '" + key + "'");
      v.kind = Value::Kind::string;
      v.str = val.substr(1, val.size() - 2);
    } else if (val == "true" || val == "false") {
      v.kind = Value::Kind::boolean;
      v.b = (val == "true");
    } else {
      double d;
      if (!parse_number(val, d))
        fail("bad value '" + val + "' for key '" + key + "'");
      v.kind = Value::Kind::number;
      v.num = d;
    }
    t.data_[section][key] = std::move(v);
  }
  return t;
}

const TomlTable::Value& TomlTable::get(const std::string& section,
                                       const std::string& key) const {
  auto si = data_.find(section);
  if (si == data_.end())
    throw ConfigError(origin_ + ": missing section [" + section + "]");
  auto ki = si->second.find(key);
  if (ki == si->second.end())
    throw ConfigError(origin_ + ": missing key '" + key + "' in [" + section +
                      "]");
  return ki->second;
}

bool TomlTable::has(const std::string& section, const std::string& key) const {
  auto si = data_.find(section);
  return si != data_.end() && si->second.count(key) > 0;
}

double TomlTable::number(const std::string& s, const std::string& k) const {
  const Value& v = get(s, k);
  if (v.kind != Value::Kind::number)
    throw ConfigError(origin_ + ": key '" + k + "' must be a number");
  return v.num;
}

double TomlTable::number_or(const std::string& s, const std::string& k,
                            double fb) const {
  return has(s, k) ? number(s, k) : fb;
}

long long TomlTable::integer(const std::string& s, const std::string& k) const {
  const double d = number(s, k);
  const long long i = static_cast<long long>(std::llround(d));
  if (std::abs(d - i) > 1e-9)
    throw ConfigError(origin_ + ": key '" + k + "' must be an integer");
  return i;
}

long long TomlTable::integer_or(const std::string& s, const std::string& k,
                                long long fb) const {
  return has(s, k) ? integer(s, k) : fb;
}

bool TomlTable::boolean_or(const std::string& s, const std::string& k,
                           bool fb) const {
  if (!has(s, k)) return fb;
  const Value& v = get(s, k);
  if (v.kind != Value::Kind::boolean)
    throw ConfigError(origin_ + ": key '" + k + "' must be true/false");
  return v.b;
}

std::string TomlTable::text(const std::string& s, const std::string& k) const {
  const Value& v = get(s, k);
  if (v.kind != Value::Kind::string)
    throw ConfigError(origin_ + ": key '" + k + "' must be a string");
  return v.str;
}

std::string TomlTable::text_or(const std::string& s, const std::string& k,
                               const std::string& fb) const {
  return has(s, k) ? text(s, k) : fb;
}

std::vector<double> TomlTable::numbers(const std::string& s,
                                       const std::string& k) const {
  const Value& v = get(s, k);
  if (v.kind == Value::Kind::number) return {v.num};
  if (v.kind != Value::Kind::number_array)
    throw ConfigError(origin_ + ": key '" + k + "' must be a number array");
  return v.nums;
}

std::vector<double> TomlTable::numbers_or(const std::string& s,
                                          const std::string& k,
                                          const std::vector<double>& fb) const {
  return has(s, k) ? numbers(s, k) : fb;
}

std::vector<std::pair<std::string, std::string>> TomlTable::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [sec, kv] : data_)
    for (const auto& [key, val] : kv) out.emplace_back(sec, key);
  return out;
}

namespace {

const std::map<std::string, std::vector<std::string>> kSchema = {
    {"metric",
     {"family", "amplitude", "shift_amplitude", "omega", "phase", "R",
      "lambda", "alpha", "lattice_per_axis", "lattice_temporal"}},
    {"solver",
     {"n", "cfl", "t_max", "domain_radius", "epsilon", "profile", "sigma",
      "mode", "picard_iterations", "manufactured", "log_every", "ring_depth",
      "history_budget_mb", "blowup_threshold"}},
    {"nonlinearity", {"enabled", "A", "kappa"}},
    {"schedule",
     {"gamma", "uniform", "commuted", "monitors", "monitor_k", "monitor_j",
      "fit_tau_lo", "fit_tau_hi"}},
    {"output", {"directory", "seed", "tol_h", "checkpoint_final"}},
};

void reject_unknown_keys(const TomlTable& t) {
  for (const auto& [sec, key] : t.entries()) {
    auto it = kSchema.find(sec);
    if (it == kSchema.end())
      throw ConfigError("config: unknown section [" + sec + "]");
    if (std::find(it->second.begin(), it->second.end(), key) ==
        it->second.end())
      throw ConfigError("config: unknown key '" + key + "' in [" + sec + "]");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_table(const TomlTable& t) {
  reject_unknown_keys(t);
  ExperimentConfig c;

  const std::string family = t.text_or("metric", "family", "minkowski");
  if (family == "minkowski")
    c.metric.family = MetricFamily::minkowski;
  else if (family == "oscillating_bump")
    c.metric.family = MetricFamily::oscillating_bump;
  else
    throw ConfigError("config: unknown metric family '" + family + "'");
  c.metric.amplitude = t.number_or("metric", "amplitude", 0.0);
  c.metric.shift_amplitude = t.number_or("metric", "shift_amplitude", 0.0);
  c.metric.omega = t.number_or("metric", "omega", 0.0);
  const auto ph = t.numbers_or("metric", "phase", {0.0, 0.0, 0.0});
  if (ph.size() != 3)
    throw ConfigError("config: metric.phase needs three entries");
  c.metric.phase = {ph[0], ph[1], ph[2]};
  c.metric.R = t.number_or("metric", "R", 2.0);
  c.lambda = t.number_or("metric", "lambda", 0.9);
  c.lattice_per_axis =
      static_cast<int>(t.integer_or("metric", "lattice_per_axis", 33));
  c.lattice_temporal =
      static_cast<int>(t.integer_or("metric", "lattice_temporal", 64));
  const double alpha = t.number_or("metric", "alpha", 0.5);

  c.solver.n = static_cast<int>(t.integer_or("solver", "n", 97));
  c.solver.cfl = t.number_or("solver", "cfl", 0.25);
  c.solver.t_max = t.number_or("solver", "t_max", 3.0);
  c.solver.domain_radius = t.number_or("solver", "domain_radius", 0.0);
  c.solver.epsilon = t.number_or("solver", "epsilon", 0.01);
  const std::string prof = t.text_or("solver", "profile", "compact_bump");
  if (prof == "compact_bump")
    c.solver.profile = Profile::compact_bump;
  else if (prof == "gaussian_bump")
    c.solver.profile = Profile::gaussian_bump;
  else
    throw ConfigError("config: unknown profile '" + prof + "'");
  c.solver.sigma = t.number_or("solver", "sigma", -1.0);
  const std::string mode = t.text_or("solver", "mode", "direct");
  if (mode == "direct")
    c.solver.mode = RunMode::direct;
  else if (mode == "picard")
    c.solver.mode = RunMode::picard;
  else
    throw ConfigError("config: unknown mode '" + mode + "'");
  c.solver.picard_iterations =
      static_cast<int>(t.integer_or("solver", "picard_iterations", 3));
  const std::string manuf = t.text_or("solver", "manufactured", "");
  if (manuf.empty())
    c.solver.manufactured = ManufacturedId::none;
  else if (manuf == "cos_bump")
    c.solver.manufactured = ManufacturedId::cos_bump;
  else
    throw ConfigError("config: unknown manufactured id '" + manuf + "'");
  c.solver.log_every = static_cast<int>(t.integer_or("solver", "log_every", 0));
  c.solver.ring_depth =
      static_cast<int>(t.integer_or("solver", "ring_depth", 3));
  c.solver.history_budget_mb =
      t.number_or("solver", "history_budget_mb", 512.0);
  c.solver.blowup_threshold =
      t.number_or("solver", "blowup_threshold", 1e6);
  c.solver.metric = c.metric;
  c.solver.lambda = c.lambda;
  c.solver.alpha = alpha;

  c.solver.nullform.enabled = t.boolean_or("nonlinearity", "enabled", false);
  const auto A = t.numbers_or("nonlinearity", "A",
                              std::vector<double>(16, 0.0));
  if (A.size() != 16)
    throw ConfigError("config: nonlinearity.A needs 16 row-major entries");
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) c.solver.nullform.A[a][b] = A[4 * a + b];
  c.solver.nullform.kappa = t.number_or("nonlinearity", "kappa", 0.0);

  c.schedule_gamma = t.number_or("schedule", "gamma", 0.0);
  c.schedule_uniform = t.numbers_or("schedule", "uniform", {});
  c.fit_tau_lo = t.number_or("schedule", "fit_tau_lo", 0.0);
  c.fit_tau_hi = t.number_or("schedule", "fit_tau_hi", 0.0);

  std::vector<double> sched = c.schedule_uniform;
  if (c.schedule_gamma > 0.0)
    sched = merge_schedules(
        sched, dyadic_schedule(c.schedule_gamma,
                               std::max(1e-9, c.solver.t_max - c.metric.R)));
  c.solver.schedule = sched;

  c.output_dir = t.text_or("output", "directory", "out");
  c.seed = static_cast<std::uint64_t>(t.integer_or("output", "seed", 12345));
  c.tol_h = t.number_or("output", "tol_h", 0.05);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return from_table(TomlTable::parse_file(path));
}

std::string ExperimentConfig::to_toml() const {
  std::ostringstream os;
  os.precision(17);
  os << "[metric]\n";
  os << "family = \""
     << (metric.family == MetricFamily::minkowski ? "minkowski"
                                                  : "oscillating_bump")
     << "\"\n";
  os << "amplitude = " << metric.amplitude << "\n";
  os << "shift_amplitude = " << metric.shift_amplitude << "\n";
  os << "omega = " << metric.omega << "\n";
  os << "phase = [" << metric.phase[0] << ", " << metric.phase[1] << ", "
     << metric.phase[2] << "]\n";
  os << "R = " << metric.R << "\n";
  os << "lambda = " << lambda << "\n";
  os << "alpha = " << solver.alpha << "\n";
  os << "lattice_per_axis = " << lattice_per_axis << "\n";
  os << "lattice_temporal = " << lattice_temporal << "\n\n";

  os << "[solver]\n";
  os << "n = " << solver.n << "\n";
  os << "cfl = " << solver.cfl << "\n";
  os << "t_max = " << solver.t_max << "\n";
  os << "domain_radius = " << solver.domain_radius << "\n";
  os << "epsilon = " << solver.epsilon << "\n";
  os << "profile = \""
     << (solver.profile == Profile::compact_bump ? "compact_bump"
                                                 : "gaussian_bump")
     << "\"\n";
  os << "sigma = " << solver.sigma << "\n";
  os << "mode = \"" << (solver.mode == RunMode::direct ? "direct" : "picard")
     << "\"\n";
  os << "picard_iterations = " << solver.picard_iterations << "\n";
  os << "manufactured = \""
     << (solver.manufactured == ManufacturedId::none ? "" : "cos_bump")
     << "\"\n";
  os << "log_every = " << solver.log_every << "\n";
  os << "ring_depth = " << solver.ring_depth << "\n";
  os << "history_budget_mb = " << solver.history_budget_mb << "\n";
  os << "blowup_threshold = " << solver.blowup_threshold << "\n\n";

  os << "[nonlinearity]\n";
  os << "enabled = " << (solver.nullform.enabled ? "true" : "false") << "\n";
  os << "A = [";
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      os << solver.nullform.A[a][b] << (a == 3 && b == 3 ? "" : ", ");
  os << "]\n";
  os << "kappa = " << solver.nullform.kappa << "\n\n";

  os << "[schedule]\n";
  os << "gamma = " << schedule_gamma << "\n";
  os << "uniform = [";
  for (std::size_t i = 0; i < schedule_uniform.size(); ++i)
    os << schedule_uniform[i] << (i + 1 < schedule_uniform.size() ? ", " : "");
  os << "]\n";
  os << "fit_tau_lo = " << fit_tau_lo << "\n";
  os << "fit_tau_hi = " << fit_tau_hi << "\n\n";

  os << "[output]\n";
  os << "directory = \"" << output_dir << "\"\n";
  os << "seed = " << seed << "\n";
  os << "tol_h = " << tol_h << "\n";
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
  const std::string s = to_toml();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace nlwave
