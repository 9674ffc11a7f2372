/*
 * Copyright 2026 The emrates Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "emrates/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "emrates/errors.hpp"

namespace emrates {
namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kKindNames[] = {"convergence", "quadrature", "moments", "girsanov",
                                           "tail",        "zvonkin",    "all"};

const std::map<std::string, std::set<std::string>>& section_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"kind", "seed", "suites"}},
      {"problem", {"drift", "drift_params", "diffusion", "diffusion_params", "dimension", "x0", "horizon"}},
      {"schedule", {"n_list", "fine_n", "m_sub", "p", "p_list", "replicas", "driftless", "bootstrap", "moment_n",
                    "lags", "anchor", "q", "time", "level", "lambda", "lambda_list", "radius",
                    "mesh_width"}},
      {"functional", {"f", "f_params", "g", "g_params"}},
      {"thresholds", {}},
      {"output", {"directory", "formats"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
  return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'");
}

class SectionReader {
 public:
  SectionReader(const pt::ptree& root, std::string prefix) : root_(root), prefix_(std::move(prefix)) {}

  const pt::ptree* find(const std::string& section) const {
    if (!prefix_.empty()) {
      if (const pt::ptree* s = child(prefix_ + "." + section)) return s;
    }
    return child(section);
  }

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    if (const pt::ptree* s = find(section)) return value(*s, key);
    return std::nullopt;
  }

  template <typename T>
  void number(const std::string& section, const std::string& key, T& out) const {
    if (auto v = get(section, key)) out = parse_number<T>(*v, section + "." + key);
  }
  template <typename T>
  void number(const std::string& section, const std::string& key, std::optional<T>& out) const {
    if (auto v = get(section, key)) out = parse_number<T>(*v, section + "." + key);
  }
  template <typename T>
  void list(const std::string& section, const std::string& key, std::vector<T>& out) const {
    if (auto v = get(section, key)) {
      out.clear();
      for (const auto& w : split_words(*v)) out.push_back(parse_number<T>(w, section + "." + key));
    }
  }
  void text(const std::string& section, const std::string& key, std::string& out) const {
    if (auto v = get(section, key)) out = *v;
  }

 private:
  const pt::ptree* child(const std::string& name) const {
    for (const auto& [k, v] : root_)
      if (k == name) return &v;
    return nullptr;
  }
  static std::optional<std::string> value(const pt::ptree& section, const std::string& key) {
    for (const auto& [k, v] : section)
      if (k == key) return trim(v.data());
    return std::nullopt;
  }

  const pt::ptree& root_;
  std::string prefix_;
};

SuiteConfig read_suite(const SectionReader& r, std::string name, ExperimentKind kind) {
  SuiteConfig s;
  s.name = std::move(name);
  s.kind = kind;

  ProblemBlock& pb = s.problem;
  r.text("problem", "drift", pb.drift);
  r.list("problem", "drift_params", pb.drift_params);
  r.text("problem", "diffusion", pb.diffusion);
  r.list("problem", "diffusion_params", pb.diffusion_params);
  r.number("problem", "dimension", pb.dimension);
  r.list("problem", "x0", pb.x0);
  r.number("problem", "horizon", pb.horizon);

  r.list("schedule", "n_list", s.n_list);
  r.number("schedule", "fine_n", s.fine_n);
  r.number("schedule", "m_sub", s.m_sub);
  r.number("schedule", "p", s.p);
  r.list("schedule", "p_list", s.p_list);
  r.number("schedule", "replicas", s.replicas);
  if (auto v = r.get("schedule", "driftless")) s.driftless = parse_bool(*v, "schedule.driftless");
  if (auto v = r.get("schedule", "bootstrap")) s.bootstrap = parse_bool(*v, "schedule.bootstrap");
  r.number("schedule", "moment_n", s.moment_n);
  r.list("schedule", "lags", s.lags);
  r.number("schedule", "anchor", s.anchor);
  r.number("schedule", "q", s.q);
  r.number("schedule", "time", s.time);
  r.number("schedule", "level", s.level);
  r.number("schedule", "lambda", s.lambda);
  r.list("schedule", "lambda_list", s.lambda_list);
  r.number("schedule", "radius", s.radius);
  r.number("schedule", "mesh_width", s.mesh_width);

  r.text("functional", "f", s.f_name);
  r.list("functional", "f_params", s.f_params);
  r.text("functional", "g", s.g_name);
  r.list("functional", "g_params", s.g_params);

  if (const pt::ptree* t = r.find("thresholds"))
    for (const auto& [k, v] : *t)
      s.thresholds[k] = parse_number<double>(trim(v.data()), "thresholds." + k);
  return s;
}

ExperimentKind read_kind(const SectionReader& r, const std::string& where) {
  const auto text = r.get("experiment", "kind");
  if (!text) throw ConfigError("missing key '" + where + "experiment.kind'");
  const auto kind = parse_experiment_kind(*text);
  if (!kind) throw ConfigError("key '" + where + "experiment.kind': unknown kind '" + *text + "'");
  return *kind;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) {
  for (int i = 0; i < 7; ++i)
    if (kKindNames[i] == text) return static_cast<ExperimentKind>(i);
  return std::nullopt;
}

ProblemSpec ProblemBlock::build() const {
  if (dimension < 1 || dimension > kMaxDim)
    throw InvalidArgument("problem.dimension must lie in 1.." + std::to_string(kMaxDim));
  Vec start{};
  if (x0.size() == 1) {
    for (int i = 0; i < dimension; ++i) start[i] = x0[0];
  } else if (x0.size() == static_cast<std::size_t>(dimension)) {
    for (int i = 0; i < dimension; ++i) start[i] = x0[i];
  } else if (!x0.empty()) {
    throw InvalidArgument("problem.x0 must have 1 or " + std::to_string(dimension) + " values");
  }
  return ProblemSpec(start, horizon, builtin_drift(drift, drift_params, dimension),
                     builtin_diffusion(diffusion, diffusion_params, dimension));
}

ExperimentConfig load_config_string(const std::string& text) {
  pt::ptree root;
  std::istringstream in(text);
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("syntax error: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }

  ExperimentConfig cfg;
  const SectionReader top(root, "");
  cfg.kind = read_kind(top, "");
  if (auto v = top.get("experiment", "seed")) cfg.seed = parse_number<std::uint64_t>(*v, "experiment.seed");
  if (auto v = top.get("output", "directory")) cfg.output_directory = *v;
  if (auto v = top.get("output", "formats")) cfg.formats = split_words(*v);

  std::set<std::string> prefixes;
  if (cfg.kind == ExperimentKind::all) {
    const auto names = top.get("experiment", "suites");
    if (!names) throw ConfigError("missing key 'experiment.suites' for kind = all");
    for (const auto& name : split_words(*names)) {
      if (!prefixes.insert(name).second) throw ConfigError("suite '" + name + "' listed twice");
      const SectionReader r(root, name);
      const auto text_kind = r.get("experiment", "kind");
      const pt::ptree* own = nullptr;
      for (const auto& [k, v] : root)
        if (k == name + ".experiment") own = &v;
      if (!own || !text_kind) throw ConfigError("missing key '" + name + ".experiment.kind'");
      const ExperimentKind kind = read_kind(r, name + ".");
      if (kind == ExperimentKind::all) throw ConfigError("suite '" + name + "' cannot be of kind all");
      cfg.suites.push_back(read_suite(r, name, kind));
    }
  } else {
    cfg.suites.push_back(read_suite(top, std::string(to_string(cfg.kind)), cfg.kind));
  }

  for (const auto& [section, body] : root) {
    std::string base = section;
    if (const auto dot = section.find('.'); dot != std::string::npos) {
      if (prefixes.count(section.substr(0, dot))) base = section.substr(dot + 1);
    }
    const auto it = section_keys().find(base);
    if (it == section_keys().end()) {
      cfg.unknown_keys.push_back(section);
      continue;
    }
    if (base == "thresholds") continue;
    for (const auto& [k, v] : body)
      if (!it->second.count(k)) cfg.unknown_keys.push_back(section + "." + k);
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_string(buf.str());
}

std::vector<std::string> known_thresholds(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::convergence:
      return {"min_slope", "max_slope", "max_slope_stderr"};
    case ExperimentKind::quadrature:
      return {"min_slope", "max_slope_stderr"};
    case ExperimentKind::moments:
      return {"slope_relative_tolerance", "max_sup_ratio"};
    case ExperimentKind::girsanov:
      return {"mean_ci_multiplier", "max_second_moment_ratio"};
    case ExperimentKind::tail:
      return {"oracle_in_interval", "zero_below_expected_count"};
    case ExperimentKind::zvonkin:
      return {"min_residual_slope", "max_boundary_sensitivity", "norm_decay"};
    case ExperimentKind::all:
      break;
  }
  return {};
}

namespace {

void check_n_list(const SuiteConfig& s, std::vector<std::string>& out, std::size_t min_len) {
  const std::string at = s.name + ": ";
  if (s.n_list.size() < min_len) {
    out.push_back(at + "schedule.n_list needs at least " + std::to_string(min_len) + " values");
    return;
  }
  for (std::size_t i = 0; i < s.n_list.size(); ++i) {
    if (s.n_list[i] < 1) out.push_back(at + "schedule.n_list entries must be positive");
    if (i > 0 && s.n_list[i] <= s.n_list[i - 1])
      out.push_back(at + "schedule.n_list must be strictly increasing");
  }
}

void check_divides(const SuiteConfig& s, std::int64_t total, const std::string& key,
                   std::vector<std::string>& out) {
  for (const auto n : s.n_list)
    if (n >= 1 && (total < n || total % n != 0))
      out.push_back(s.name + ": " + key + " not a multiple of n=" + std::to_string(n));
}

void check_suite(const SuiteConfig& s, std::vector<std::string>& out) {
  const std::string at = s.name + ": ";
  std::optional<ProblemSpec> problem;
  const auto drifts = drift_catalogue();
  const auto diffusions = diffusion_catalogue();
  bool keys_ok = true;
  if (std::find(drifts.begin(), drifts.end(), s.problem.drift) == drifts.end()) {
    out.push_back(at + "problem.drift: unknown drift '" + s.problem.drift + "'");
    keys_ok = false;
  }
  if (std::find(diffusions.begin(), diffusions.end(), s.problem.diffusion) == diffusions.end()) {
    out.push_back(at + "problem.diffusion: unknown diffusion '" + s.problem.diffusion + "'");
    keys_ok = false;
  }
  if (keys_ok) {
    try {
      problem.emplace(s.problem.build());
    } catch (const std::exception& e) {
      out.push_back(at + "problem: " + e.what());
    }
  }

  const bool asserted = !s.thresholds.empty();
  const std::int64_t min_replicas = asserted ? 100 : 2;
  if (s.replicas < min_replicas)
    out.push_back(at + "schedule.replicas must be >= " + std::to_string(min_replicas) +
                  (asserted ? " when thresholds are asserted" : ""));
  if (!(s.p > 0.0) || !std::isfinite(s.p)) out.push_back(at + "schedule.p must be positive");
  if (s.bootstrap && s.kind != ExperimentKind::convergence && s.kind != ExperimentKind::quadrature)
    out.push_back(at + "schedule.bootstrap applies to convergence and quadrature only");

  const auto allowed = known_thresholds(s.kind);
  for (const auto& [k, v] : s.thresholds) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      out.push_back(at + "thresholds." + k + ": not a threshold of kind " + std::string(to_string(s.kind)));
    if (!std::isfinite(v)) out.push_back(at + "thresholds." + k + " must be finite");
  }
  const bool fits = s.thresholds.count("min_slope") || s.thresholds.count("max_slope") ||
                    s.thresholds.count("max_slope_stderr");

  switch (s.kind) {
    case ExperimentKind::convergence:
      check_n_list(s, out, fits ? 3 : 1);
      check_divides(s, s.fine_n, "fine_n", out);
      break;
    case ExperimentKind::quadrature: {
      check_n_list(s, out, fits ? 3 : 1);
      if (s.m_sub < 1) out.push_back(at + "schedule.m_sub must be >= 1");
      try {
        builtin_test_functions(s.f_name, s.f_params, s.g_name, s.g_params, s.problem.dimension);
      } catch (const std::exception& e) {
        out.push_back(at + "functional: " + e.what());
      }
      break;
    }
    case ExperimentKind::moments: {
      if (s.moment_n < 2) out.push_back(at + "schedule.moment_n must be >= 2");
      if (s.p_list.empty()) out.push_back(at + "schedule.p_list must not be empty");
      for (const double p : s.p_list)
        if (!(p > 0.0)) out.push_back(at + "schedule.p_list entries must be positive");
      if (s.lags.size() < 3) out.push_back(at + "schedule.lags needs at least 3 values");
      const std::int64_t anchor = s.anchor.value_or(s.moment_n / 2);
      if (anchor < 0) out.push_back(at + "schedule.anchor must be >= 0");
      for (const auto lag : s.lags)
        if (lag < 1 || anchor + lag > s.moment_n)
          out.push_back(at + "schedule.lags: lag " + std::to_string(lag) + " does not fit in moment_n=" +
                        std::to_string(s.moment_n) + " from anchor " + std::to_string(anchor));
      if (s.thresholds.count("max_sup_ratio")) check_n_list(s, out, 2);
      break;
    }
    case ExperimentKind::girsanov:
      check_n_list(s, out, 1);
      if (s.p_list.empty()) out.push_back(at + "schedule.p_list must not be empty");
      if (s.replicas < 1000) out.push_back(at + "schedule.replicas must be >= 1000 for girsanov");
      if (!std::isfinite(s.q)) out.push_back(at + "schedule.q must be finite");
      if (s.thresholds.count("max_second_moment_ratio") &&
          std::find(s.p_list.begin(), s.p_list.end(), 2.0) == s.p_list.end())
        out.push_back(at + "thresholds.max_second_moment_ratio needs 2 in schedule.p_list");
      break;
    case ExperimentKind::tail:
      check_n_list(s, out, 1);
      if (asserted && problem && !problem->diffusion.is_constant)
        out.push_back(at + "problem.diffusion: tail thresholds need a constant diffusion");
      if (s.time && !(*s.time > 0.0 && *s.time <= s.problem.horizon))
        out.push_back(at + "schedule.time must lie in (0, horizon]");
      if (!(s.level > 0.0 && s.level < 1.0)) out.push_back(at + "schedule.level must lie in (0, 1)");
      break;
    case ExperimentKind::zvonkin: {
      if (s.problem.dimension != 1) out.push_back(at + "problem.dimension must be 1 for zvonkin");
      if (!(s.lambda > 0.0)) out.push_back(at + "schedule.lambda must be > 0");
      if (!(s.radius >= 8.0)) out.push_back(at + "schedule.radius must be >= 8");
      if (!(s.mesh_width > 0.0 && s.mesh_width <= 1e-2))
        out.push_back(at + "schedule.mesh_width must lie in (0, 1e-2]");
      check_n_list(s, out, s.thresholds.count("min_residual_slope") ? 3 : 1);
      if (!s.n_list.empty()) check_divides(s, s.n_list.back(), "largest n", out);
      const bool sweep = s.thresholds.count("norm_decay") || s.thresholds.count("max_boundary_sensitivity");
      if (sweep || !s.lambda_list.empty()) {
        if (s.lambda_list.size() < 4) out.push_back(at + "schedule.lambda_list needs at least 4 values");
        for (std::size_t i = 1; i < s.lambda_list.size(); ++i)
          if (!(s.lambda_list[i] > s.lambda_list[i - 1]))
            out.push_back(at + "schedule.lambda_list must be strictly increasing");
        if (!s.lambda_list.empty() &&
            (!(s.lambda_list.front() > 0.0) || s.lambda_list.back() < 1e3 * s.lambda_list.front()))
          out.push_back(at + "schedule.lambda_list must be positive and span at least 3 decades");
      }
      break;
    }
    case ExperimentKind::all:
      out.push_back(at + "nested kind all");
      break;
  }
}

}  // namespace

std::vector<std::string> validate(const ExperimentConfig& config) {
  std::vector<std::string> out;
  try {
    for (const auto& key : config.unknown_keys) out.push_back("unknown key '" + key + "'");
    for (const auto& f : config.formats)
      if (f != "csv" && f != "json") out.push_back("output.formats: unknown format '" + f + "'");
    if (config.suites.empty()) out.push_back("no suites to run");
    for (const auto& s : config.suites) check_suite(s, out);
  } catch (const std::exception& e) {
    out.push_back(std::string("internal validation failure: ") + e.what());
  }
  return out;
}

}  // namespace emrates
