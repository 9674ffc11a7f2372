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

#include "emrates/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>

#include "emrates/errors.hpp"
#include "emrates/rng.hpp"
#include "emrates/stats.hpp"
#include "emrates/zvonkin1d.hpp"

namespace emrates {
namespace {

constexpr double kSensitivityLambdaFloor = 10.0;

/// Independent seed for estimator `tag` of a suite.
std::uint64_t sub_seed(std::uint64_t master, std::uint64_t tag) {
  RngStream s(master, (std::uint64_t{1} << 63) | tag);
  return s.next_u64();
}

std::string number_label(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void add_curve_rows(SuiteReport& r, const std::string& name, const StrongErrorCurve& curve,
                    std::uint64_t seed) {
  nlohmann::json boot = nlohmann::json::array();
  for (const auto& pt : curve.points) {
    r.rows.push_back({name, pt.n, pt.result.estimate, pt.result.std_error, pt.result.replicas,
                      curve.moment_order, seed});
    if (!std::isnan(pt.result.bootstrap_std_error))
      boot.push_back({{"n", pt.n}, {"delta_std_error", pt.result.std_error},
                      {"bootstrap_std_error", pt.result.bootstrap_std_error}});
  }
  if (!boot.empty()) r.details["bootstrap"] = boot;
}

int bootstrap_resamples(const SuiteConfig& s) { return s.bootstrap ? 200 : 0; }

Verdict compare(std::string key, std::string quantity, double observed, std::string relation,
                double threshold) {
  bool ok = false;
  if (relation == ">=") ok = observed >= threshold;
  else if (relation == "<=") ok = observed <= threshold;
  else if (relation == "<") ok = observed < threshold;
  else if (relation == "==") ok = observed == threshold;
  return {std::move(key), std::move(quantity), std::move(relation), observed, threshold, ok, {}};
}

std::optional<double> threshold(const SuiteConfig& s, const std::string& key) {
  const auto it = s.thresholds.find(key);
  if (it == s.thresholds.end()) return std::nullopt;
  return it->second;
}

/// Fit plus slope verdicts shared by the curve-based suites.
void fit_and_judge(SuiteReport& r, const std::string& name, const StrongErrorCurve& curve,
                   const std::string& min_key, const std::string& max_key,
                   const std::string& stderr_key) {
  const SuiteConfig& s = r.input;
  RateFit fit;
  try {
    fit = fit_rate(curve);
  } catch (const InvalidArgument& e) {
    r.notes.push_back(name + ": no rate fit (" + e.what() + ")");
    for (const auto* key : {&min_key, &max_key, &stderr_key})
      if (!key->empty() && threshold(s, *key)) {
        Verdict v{*key, name + " fit", "fit", std::numeric_limits<double>::quiet_NaN(),
                  *threshold(s, *key), false, "fit unavailable"};
        r.verdicts.push_back(v);
      }
    return;
  }
  r.fits.emplace_back(name, fit);
  if (fit.status == FitStatus::exact_scheme) {
    r.notes.push_back(name + ": exact scheme, every estimate is zero");
    for (const auto* key : {&min_key, &max_key, &stderr_key})
      if (!key->empty() && threshold(s, *key)) {
        Verdict v{*key, name + " fit", "exact", 0.0, *threshold(s, *key), true, "exact scheme"};
        r.verdicts.push_back(v);
      }
    return;
  }
  if (!fit.excluded.empty())
    r.notes.push_back(name + ": " + std::to_string(fit.excluded.size()) +
                      " point(s) excluded from the fit (estimate below 3 std errors)");
  if (auto t = threshold(s, min_key)) r.verdicts.push_back(compare(min_key, name + " slope", fit.slope, ">=", *t));
  if (!max_key.empty())
    if (auto t = threshold(s, max_key)) r.verdicts.push_back(compare(max_key, name + " slope", fit.slope, "<=", *t));
  if (!stderr_key.empty())
    if (auto t = threshold(s, stderr_key))
      r.verdicts.push_back(compare(stderr_key, name + " slope_stderr", fit.slope_stderr, "<=", *t));
}

void run_convergence(SuiteReport& r, const Execution& exec) {
  const SuiteConfig& s = r.input;
  const ProblemSpec problem = s.problem.build();
  const std::uint64_t seed = sub_seed(r.seed, 1);
  const StrongErrorCurve curve =
      strong_error_curve(problem, s.n_list, s.fine_n, s.p, s.replicas, seed, exec, bootstrap_resamples(s));
  add_curve_rows(r, "convergence", curve, seed);
  fit_and_judge(r, "convergence", curve, "min_slope", "max_slope", "max_slope_stderr");
  r.details["fine_n"] = s.fine_n;
}

void run_quadrature(SuiteReport& r, const Execution& exec) {
  const SuiteConfig& s = r.input;
  const ProblemSpec problem = s.problem.build();
  const TestFunctionSpec fns =
      builtin_test_functions(s.f_name, s.f_params, s.g_name, s.g_params, problem.dimension);
  const std::uint64_t seed = sub_seed(r.seed, 2);
  const StrongErrorCurve curve =
      quadrature_decay(problem, fns, s.n_list, s.m_sub, s.p, s.replicas, seed, s.driftless, exec,
                       bootstrap_resamples(s));
  add_curve_rows(r, "quadrature", curve, seed);
  fit_and_judge(r, "quadrature", curve, "min_slope", "", "max_slope_stderr");
  r.details["m_sub"] = s.m_sub;
  r.details["driftless"] = s.driftless;
}

void run_moments(SuiteReport& r, const Execution& exec) {
  const SuiteConfig& s = r.input;
  const ProblemSpec problem = s.problem.build();
  const std::int64_t anchor = s.anchor.value_or(s.moment_n / 2);
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (const auto lag : s.lags) pairs.emplace_back(anchor, anchor + lag);

  const auto tolerance = threshold(s, "slope_relative_tolerance");
  nlohmann::json increments = nlohmann::json::array();
  for (std::size_t i = 0; i < s.p_list.size(); ++i) {
    const double p = s.p_list[i];
    const std::uint64_t seed = sub_seed(r.seed, 10 + i);
    const MomentScaling ms = moment_scaling(problem, s.moment_n, p, pairs, s.replicas, seed, exec);
    const std::string name = "moments_increment_p" + number_label(p);
    for (const auto& pt : ms.points)
      r.rows.push_back({name, pt.end - pt.start, pt.moment.estimate, pt.moment.std_error,
                        pt.moment.replicas, p, seed});
    r.fits.emplace_back(name, ms.fit);
    increments.push_back({{"p", p}, {"slope", ms.fit.slope}, {"expected_slope", p / 2.0}});
    if (tolerance) {
      const double expected = p / 2.0;
      Verdict v = compare("slope_relative_tolerance", name + " |slope - p/2| / (p/2)", std::fabs(ms.fit.slope - expected) / expected,
                          "<=", *tolerance);
      r.verdicts.push_back(v);
    }
  }
  r.details["increment_fits"] = increments;
  r.details["anchor"] = anchor;
  r.details["moment_n"] = s.moment_n;

  if (!s.n_list.empty()) {
    const std::uint64_t seed = sub_seed(r.seed, 20);
    const std::string name = "moments_sup_p" + number_label(s.p);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto n : s.n_list) {
      const auto [m, node] = sup_moment(problem, n, s.p, s.replicas, seed, exec);
      r.rows.push_back({name, n, m.estimate, m.std_error, m.replicas, s.p, seed});
      lo = std::min(lo, m.estimate);
      hi = std::max(hi, m.estimate);
      (void)node;
    }
    const double ratio = hi / lo;
    r.details["sup_moment_ratio"] = ratio;
    if (auto t = threshold(s, "max_sup_ratio"))
      r.verdicts.push_back(compare("max_sup_ratio", name + " max/min over n", ratio, "<", *t));
  }
}

void run_girsanov(SuiteReport& r, const Execution& exec) {
  const SuiteConfig& s = r.input;
  const ProblemSpec problem = s.problem.build();
  const std::uint64_t seed = sub_seed(r.seed, 3);
  const GirsanovTable table = girsanov_moments(problem, s.q, s.p_list, s.n_list, s.replicas, seed, 700.0, exec);
  const auto ci = threshold(s, "mean_ci_multiplier");
  double lo2 = std::numeric_limits<double>::infinity(), hi2 = 0.0;
  bool have2 = false;
  for (const auto& row : table.rows) {
    const std::string name = "girsanov_q" + number_label(row.q) + "_p" + number_label(row.p);
    r.rows.push_back({name, row.n, row.moment.estimate, row.moment.std_error, row.moment.replicas,
                      row.p, seed});
    if (row.p == 1.0 && ci) {
      Verdict v = compare("mean_ci_multiplier",
                          name + " n=" + std::to_string(row.n) + " |mean - 1| / std_error",
                          std::fabs(row.moment.estimate - 1.0) / row.moment.std_error, "<=", *ci);
      r.verdicts.push_back(v);
    }
    if (row.p == 2.0) {
      have2 = true;
      lo2 = std::min(lo2, row.moment.estimate);
      hi2 = std::max(hi2, row.moment.estimate);
      if (!std::isfinite(row.moment.estimate))
        r.notes.push_back(name + " n=" + std::to_string(row.n) + ": non-finite second moment");
    }
  }
  if (have2) {
    const double ratio = hi2 / lo2;
    r.details["second_moment_ratio"] = ratio;
    if (auto t = threshold(s, "max_second_moment_ratio"))
      r.verdicts.push_back(compare("max_second_moment_ratio", "girsanov second moment max/min over n", std::isfinite(ratio) ? ratio
                                   : std::numeric_limits<double>::infinity(), "<", *t));
  }
  r.details["max_log_weight"] = table.max_log_weight;
  r.details["capped"] = table.capped;
  if (table.capped > 0)
    r.notes.push_back(std::to_string(table.capped) + " weight(s) above the log cap");
}

void run_tail(SuiteReport& r, const Execution& exec) {
  const SuiteConfig& s = r.input;
  const ProblemSpec problem = s.problem.build();
  const double time = s.time.value_or(problem.horizon);
  const std::uint64_t seed = sub_seed(r.seed, 4);
  nlohmann::json points = nlohmann::json::array();
  for (const auto n : s.n_list) {
    const MonteCarloResult m = tail_probability(problem, n, time, s.replicas, seed, s.level, exec);
    r.rows.push_back({"tail", n, m.estimate, m.std_error, m.replicas, 1.0, seed});
    nlohmann::json point{{"n", n}, {"estimate", m.estimate}, {"ci_lower", m.ci_lower},
                         {"ci_upper", m.ci_upper},
                         {"exceedances", static_cast<std::int64_t>(std::llround(m.estimate * m.replicas))}};
    if (problem.diffusion.is_constant) {
      const TimeGrid grid(n, problem.horizon);
      const double c = at(problem.diffusion(problem.x0), 0, 0);
      const double variance = c * c * (time - grid.kappa(time));
      const double oracle = stats::gaussian_norm_tail(problem.dimension, variance, 1.0);
      point["oracle"] = oracle;
      const std::string label = "tail n=" + std::to_string(n);
      if (threshold(s, "oracle_in_interval")) {
        Verdict v{"oracle_in_interval", label + " oracle in " + number_label(s.level) + " interval", "in", oracle, 0.0,
                  m.ci_lower <= oracle && oracle <= m.ci_upper,
                  "interval [" + number_label(m.ci_lower) + ", " + number_label(m.ci_upper) + "]"};
        r.verdicts.push_back(v);
      }
      if (auto t = threshold(s, "zero_below_expected_count")) {
        const double expected = oracle * static_cast<double>(m.replicas);
        if (expected < *t)
          r.verdicts.push_back(compare("zero_below_expected_count", label + " exceedances", point["exceedances"].get<double>(), "==", 0.0));
      }
    }
    points.push_back(point);
  }
  r.details["time"] = time;
  r.details["level"] = s.level;
  r.details["points"] = points;
}

void run_zvonkin(SuiteReport& r, const Execution& exec) {
  const SuiteConfig& s = r.input;
  const ProblemSpec problem = s.problem.build();
  const zvonkin::ResolventSolution sol =
      zvonkin::solve_resolvent(problem.drift, problem.diffusion, s.lambda, s.radius, s.mesh_width);
  {
    std::ostringstream csv;
    zvonkin::write_solution_csv(sol, csv);
    r.solution_csv = csv.str();
  }
  r.details["solution"] = {{"lambda", sol.lambda},
                           {"radius", sol.radius},
                           {"mesh_width", sol.mesh_width},
                           {"mesh_points", sol.x.size()},
                           {"boundary_condition", sol.boundary_condition},
                           {"weighted_sup_u", sol.weighted_sup_u},
                           {"sup_du", sol.sup_du},
                           {"sup_d2u", sol.sup_d2u},
                           {"holder_exponent", sol.holder_exponent},
                           {"holder_d2u_sampled", sol.holder_d2u},
                           {"max_residual", sol.max_residual}};

  const std::uint64_t seed = sub_seed(r.seed, 5);
  const zvonkin::ResidualCurve rc = zvonkin::ito_tanaka_curve(problem, sol, s.n_list, s.replicas, seed, exec);
  add_curve_rows(r, "zvonkin_residual", rc.curve, seed);
  r.details["exited_replicas"] = rc.exited;
  if (rc.exited > 0) r.notes.push_back(std::to_string(rc.exited) + " replica(s) left the domain and were discarded");
  fit_and_judge(r, "zvonkin_residual", rc.curve, "min_residual_slope", "", "");

  if (!s.lambda_list.empty()) {
    const auto sweep = zvonkin::norm_decay_sweep(problem.drift, problem.diffusion, s.lambda_list,
                                                 s.radius, s.mesh_width);
    const auto wide = zvonkin::norm_decay_sweep(problem.drift, problem.diffusion, s.lambda_list,
                                                2.0 * s.radius, s.mesh_width);
    nlohmann::json rows = nlohmann::json::array();
    std::int64_t increases = 0;
    double sensitivity = 0.0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      if (i > 0 && !(sweep[i].sup_du < sweep[i - 1].sup_du)) ++increases;
      double rel = 0.0;
      if (wide[i].sup_du > 0.0) rel = std::fabs(sweep[i].sup_du - wide[i].sup_du) / wide[i].sup_du;
      else if (sweep[i].sup_du > 0.0) rel = std::numeric_limits<double>::infinity();
      if (sweep[i].lambda >= kSensitivityLambdaFloor) sensitivity = std::max(sensitivity, rel);
      rows.push_back({{"lambda", sweep[i].lambda},
                      {"sup_du", sweep[i].sup_du},
                      {"sup_d2u", sweep[i].sup_d2u},
                      {"weighted_sup_u", sweep[i].weighted_sup_u},
                      {"sup_du_double_radius", wide[i].sup_du},
                      {"relative_change", rel}});
    }
    r.details["norm_sweep"] = rows;
    r.details["sensitivity_lambda_floor"] = kSensitivityLambdaFloor;
    if (const auto lambda0 = zvonkin::empirical_lambda0(sweep)) r.details["empirical_lambda0"] = *lambda0;
    else r.details["empirical_lambda0"] = nullptr;
    if (threshold(s, "norm_decay"))
      r.verdicts.push_back(compare("norm_decay", "sup|u'| non-decreasing steps over lambda_list",
                                   static_cast<double>(increases), "==", 0.0));
    if (auto t = threshold(s, "max_boundary_sensitivity"))
      r.verdicts.push_back(compare("max_boundary_sensitivity", "sup|u'| relative change R -> 2R", sensitivity, "<", *t));
  }
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

bool ExperimentReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.passed(); });
}

std::string resolve_output_directory(const ExperimentConfig& config, const RunOptions& options) {
  if (options.output_directory) return *options.output_directory;
  if (config.output_directory) return *config.output_directory;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return kDefaultOutputDir;
}

SuiteReport run_suite(const SuiteConfig& suite, std::uint64_t seed, const Execution& exec) {
  SuiteReport r;
  r.input = suite;
  r.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  switch (suite.kind) {
    case ExperimentKind::convergence: run_convergence(r, exec); break;
    case ExperimentKind::quadrature: run_quadrature(r, exec); break;
    case ExperimentKind::moments: run_moments(r, exec); break;
    case ExperimentKind::girsanov: run_girsanov(r, exec); break;
    case ExperimentKind::tail: run_tail(r, exec); break;
    case ExperimentKind::zvonkin: run_zvonkin(r, exec); break;
    case ExperimentKind::all: throw InvalidArgument("suite of kind all");
  }
  for (const auto& [key, value] : suite.thresholds) {
    const bool judged = std::any_of(r.verdicts.begin(), r.verdicts.end(),
                                    [&key](const Verdict& v) { return v.key == key; });
    if (!judged) r.verdicts.push_back({key, key, "n/a", 0.0, value, true, "not triggered"});
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ExperimentReport run(const ExperimentConfig& config, const RunOptions& options) {
  const auto violations = validate(config);
  if (!violations.empty()) {
    std::string msg = "invalid config:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ConfigError(msg);
  }
  ExperimentReport report;
  report.version = EMRATES_VERSION_STRING;
  report.seed = options.seed.value_or(config.seed);
  const Execution exec{static_cast<unsigned>(std::max(0, options.workers))};
  report.workers = static_cast<int>(exec.resolved());
  for (const auto& suite : config.suites) report.suites.push_back(run_suite(suite, report.seed, exec));

  report.output_directory = resolve_output_directory(config, options);
  if (options.write_outputs) {
    namespace fs = std::filesystem;
    const fs::path dir(report.output_directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw SimulationError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const bool csv = std::find(config.formats.begin(), config.formats.end(), "csv") != config.formats.end();
    const bool json = std::find(config.formats.begin(), config.formats.end(), "json") != config.formats.end();
    if (csv) {
      report.written_files.push_back((dir / "results.csv").string());
      for (const auto& s : report.suites)
        if (!s.solution_csv.empty()) report.written_files.push_back((dir / (s.input.name + "_solution.csv")).string());
    }
    if (json) report.written_files.push_back((dir / "report.json").string());
    if (csv) {
      write_file_atomic((dir / "results.csv").string(), format_csv(report));
      for (const auto& s : report.suites)
        if (!s.solution_csv.empty())
          write_file_atomic((dir / (s.input.name + "_solution.csv")).string(), s.solution_csv);
    }
    if (json) write_file_atomic((dir / "report.json").string(), to_json(report).dump(2) + "\n");
  }
  return report;
}

}  // namespace emrates
