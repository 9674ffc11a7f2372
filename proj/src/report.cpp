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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "emrates/errors.hpp"
#include "emrates/experiments.hpp"

namespace emrates {
namespace {

void put_double(std::string& out, double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

template <typename Int>
void put_int(std::string& out, Int v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

/// JSON has no NaN or infinity; those become null.
nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::json fit_json(const RateFit& f) {
  nlohmann::json excluded = nlohmann::json::array();
  for (const double x : f.excluded) excluded.push_back(x);
  return {{"status", f.status == FitStatus::ok ? "ok" : "exact_scheme"},
          {"slope", finite_or_null(f.slope)},
          {"intercept", finite_or_null(f.intercept)},
          {"slope_stderr", finite_or_null(f.slope_stderr)},
          {"slope_ci_lower", finite_or_null(f.slope_ci_lower)},
          {"slope_ci_upper", finite_or_null(f.slope_ci_upper)},
          {"r_squared", finite_or_null(f.r_squared)},
          {"points_used", f.points_used},
          {"excluded", excluded}};
}

nlohmann::json input_json(const SuiteConfig& s) {
  nlohmann::json j{{"name", s.name},
                   {"kind", std::string(to_string(s.kind))},
                   {"problem",
                    {{"drift", s.problem.drift},
                     {"drift_params", s.problem.drift_params},
                     {"diffusion", s.problem.diffusion},
                     {"diffusion_params", s.problem.diffusion_params},
                     {"dimension", s.problem.dimension},
                     {"x0", s.problem.x0},
                     {"horizon", s.problem.horizon}}},
                   {"replicas", s.replicas},
                   {"thresholds", s.thresholds}};
  nlohmann::json& sched = j["schedule"];
  sched["n_list"] = s.n_list;
  switch (s.kind) {
    case ExperimentKind::convergence:
      sched["fine_n"] = s.fine_n;
      sched["p"] = s.p;
      break;
    case ExperimentKind::quadrature:
      sched["m_sub"] = s.m_sub;
      sched["p"] = s.p;
      sched["driftless"] = s.driftless;
      j["functional"] = {{"f", s.f_name}, {"f_params", s.f_params}, {"g", s.g_name}, {"g_params", s.g_params}};
      break;
    case ExperimentKind::moments:
      sched["moment_n"] = s.moment_n;
      sched["lags"] = s.lags;
      sched["anchor"] = s.anchor.value_or(s.moment_n / 2);
      sched["p_list"] = s.p_list;
      sched["p"] = s.p;
      break;
    case ExperimentKind::girsanov:
      sched["q"] = s.q;
      sched["p_list"] = s.p_list;
      break;
    case ExperimentKind::tail:
      sched["time"] = s.time ? nlohmann::json(*s.time) : nlohmann::json("horizon");
      sched["level"] = s.level;
      break;
    case ExperimentKind::zvonkin:
      sched["lambda"] = s.lambda;
      sched["lambda_list"] = s.lambda_list;
      sched["radius"] = s.radius;
      sched["mesh_width"] = s.mesh_width;
      break;
    case ExperimentKind::all:
      break;
  }
  return j;
}

}  // namespace

std::string format_csv(const ExperimentReport& report) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& suite : report.suites)
    for (const auto& row : suite.rows) {
      out += row.experiment;
      out += ',';
      put_int(out, row.n);
      out += ',';
      put_double(out, row.estimate);
      out += ',';
      put_double(out, row.std_error);
      out += ',';
      put_int(out, row.replicas);
      out += ',';
      put_double(out, row.p);
      out += ',';
      put_int(out, row.seed);
      out += '\n';
    }
  return out;
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json suites = nlohmann::json::array();
  for (const auto& s : report.suites) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.rows)
      rows.push_back({{"experiment", r.experiment},
                      {"n", r.n},
                      {"estimate", finite_or_null(r.estimate)},
                      {"std_error", finite_or_null(r.std_error)},
                      {"replicas", r.replicas},
                      {"p", r.p},
                      {"seed", r.seed}});
    nlohmann::json fits = nlohmann::json::object();
    for (const auto& [name, fit] : s.fits) fits[name] = fit_json(fit);
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& v : s.verdicts) {
      nlohmann::json jv{{"key", v.key},
                        {"quantity", v.quantity},
                        {"relation", v.relation},
                        {"observed", finite_or_null(v.observed)},
                        {"threshold", finite_or_null(v.threshold)},
                        {"passed", v.passed}};
      if (!v.note.empty()) jv["note"] = v.note;
      verdicts.push_back(jv);
    }
    suites.push_back({{"name", s.input.name},
                      {"kind", std::string(to_string(s.input.kind))},
                      {"input", input_json(s.input)},
                      {"master_seed", report.seed},
                      {"rows", rows},
                      {"fits", fits},
                      {"verdicts", verdicts},
                      {"passed", s.passed()},
                      {"notes", s.notes},
                      {"details", s.details},
                      {"wall_seconds", s.wall_seconds}});
  }
  return {{"csv_schema", kCsvSchema},
          {"csv_columns", kCsvHeader},
          {"version", report.version},
          {"master_seed", report.seed},
          {"workers", report.workers},
          {"passed", report.passed()},
          {"suites", suites}};
}

std::string plot_data(const std::string& report_json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(report_json);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("report is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("suites") || !j["suites"].is_array())
    throw ConfigError("report has no 'suites' array");

  std::ostringstream out;
  bool first = true;
  try {
    for (const auto& suite : j["suites"]) {
      // Series in first-appearance order.
      std::vector<std::string> order;
      std::map<std::string, std::vector<const nlohmann::json*>> series;
      for (const auto& row : suite.at("rows")) {
        const std::string name = row.at("experiment").get<std::string>();
        if (!series.count(name)) order.push_back(name);
        series[name].push_back(&row);
      }
      for (const auto& name : order) {
        if (!first) out << "\n\n";
        first = false;
        out << "# suite " << suite.at("name").get<std::string>() << " series " << name << '\n';
        const auto& fits = suite.at("fits");
        if (fits.contains(name) && !fits[name]["slope"].is_null())
          out << "# fit slope " << fits[name]["slope"].get<double>() << " intercept "
              << fits[name]["intercept"].get<double>() << '\n';
        out << "# n estimate std_error\n";
        for (const auto* row : series[name]) {
          std::string line;
          put_int(line, (*row).at("n").get<std::int64_t>());
          for (const char* key : {"estimate", "std_error"}) {
            line += ' ';
            const auto& v = (*row).at(key);
            if (v.is_null()) line += "nan";
            else put_double(line, v.get<double>());
          }
          out << line << '\n';
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw SimulationError("cannot open '" + tmp + "' for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) throw SimulationError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw SimulationError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

}  // namespace emrates
