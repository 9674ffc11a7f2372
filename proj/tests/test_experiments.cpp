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

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "emrates/config.hpp"
#include "emrates/errors.hpp"
#include "emrates/experiments.hpp"

using namespace emrates;
namespace fs = std::filesystem;

namespace {

std::string convergence_config(const std::string& drift, const std::string& thresholds,
                               const std::string& fine_n = "256") {
  return "[experiment]\nkind = convergence\nseed = 11\n"
         "[problem]\n" + drift + "\nx0 = 1\n"
         "[schedule]\nn_list = 4 8 16 32\nfine_n = " + fine_n + "\nreplicas = 400\n"
         "[thresholds]\n" + thresholds + "\n";
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("emrates_test_" + name);
  fs::remove_all(dir);
  return dir;
}

RunOptions in_memory(int workers = 1) {
  RunOptions opts;
  opts.workers = workers;
  opts.write_outputs = false;
  return opts;
}

const ExperimentConfig& smoke() {
  static const ExperimentConfig cfg = load_config_file(std::string(EMRATES_CONFIG_DIR) + "/smoke_all.ini");
  return cfg;
}

const ExperimentReport& smoke_report() {
  static const ExperimentReport rep = run(smoke(), in_memory(1));
  return rep;
}

}  // namespace

TEST_CASE("exact scheme passes slope thresholds with a note", "[experiments]") {
  const ExperimentConfig cfg =
      load_config_string(convergence_config("drift = zero", "min_slope = 0.65\nmax_slope_stderr = 0.05"));
  const ExperimentReport rep = run(cfg, in_memory());
  REQUIRE(rep.suites.size() == 1);
  const SuiteReport& s = rep.suites.front();
  CHECK(s.rows.size() == 4);
  for (const auto& row : s.rows) CHECK(row.estimate == 0.0);
  REQUIRE(s.verdicts.size() == 2);
  for (const auto& v : s.verdicts) {
    CHECK(v.passed);
    CHECK(v.note == "exact scheme");
  }
  CHECK(rep.passed());
}

TEST_CASE("unreachable thresholds fail", "[experiments]") {
  const ExperimentConfig cfg =
      load_config_string(convergence_config("drift = power\ndrift_params = 0.5", "min_slope = 5\nmax_slope = 10"));
  const ExperimentReport rep = run(cfg, in_memory());
  const SuiteReport& s = rep.suites.front();
  REQUIRE(s.verdicts.size() == 2);
  CHECK_FALSE(s.verdicts[0].passed);
  CHECK(s.verdicts[0].relation == ">=");
  CHECK(s.verdicts[1].passed);
  CHECK_FALSE(s.passed());
  CHECK_FALSE(rep.passed());
  REQUIRE(s.fits.size() == 1);
  CHECK(s.fits[0].first == "convergence");
}

TEST_CASE("bootstrap cross-check goes to the report only", "[experiments]") {
  const std::string text = convergence_config("drift = power\ndrift_params = 0.5", "min_slope = 0.1");
  const ExperimentReport plain = run(load_config_string(text), in_memory());
  std::string with = text;
  with.replace(with.find("replicas = 400"), 14, "replicas = 400\nbootstrap = true");
  const ExperimentReport boot = run(load_config_string(with), in_memory());
  CHECK(format_csv(plain) == format_csv(boot));
  CHECK_FALSE(plain.suites[0].details.contains("bootstrap"));
  const auto& rows = boot.suites[0].details.at("bootstrap");
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    const double ratio = row.at("bootstrap_std_error").get<double>() / row.at("delta_std_error").get<double>();
    CHECK(ratio > 0.7);
    CHECK(ratio < 1.4);
  }
}

TEST_CASE("invalid configs are rejected before running", "[experiments]") {
  const ExperimentConfig cfg = load_config_string(convergence_config("drift = zero", "min_slope = 0.5", "250"));
  CHECK_THROWS_AS(run(cfg, in_memory()), ConfigError);
}

TEST_CASE("every kind produces its rows", "[experiments]") {
  const ExperimentReport& rep = smoke_report();
  REQUIRE(rep.suites.size() == 6);
  std::set<std::string> names;
  for (const auto& s : rep.suites)
    for (const auto& row : s.rows) {
      names.insert(row.experiment);
      CHECK(std::isfinite(row.estimate));
      CHECK(row.seed != 0);
    }
  for (const char* expected : {"convergence", "quadrature", "moments_increment_p2", "moments_sup_p2",
                               "girsanov_q1_p1", "girsanov_q1_p2", "tail", "zvonkin_residual"})
    CHECK(names.count(expected) == 1);
  CHECK_FALSE(rep.suites[5].solution_csv.empty());
  CHECK(rep.suites[5].solution_csv.rfind("x,u,du,d2u\n", 0) == 0);
  CHECK(rep.passed());
}

TEST_CASE("suite seeds are independent of suite order", "[experiments]") {
  const ExperimentReport& rep = smoke_report();
  const SuiteReport alone = run_suite(smoke().suites[2], rep.seed, Execution{1});
  REQUIRE(alone.rows.size() == rep.suites[2].rows.size());
  for (std::size_t i = 0; i < alone.rows.size(); ++i) CHECK(alone.rows[i].estimate == rep.suites[2].rows[i].estimate);
}

TEST_CASE("CSV output is identical across worker counts", "[experiments]") {
  const std::string one = format_csv(smoke_report());
  const std::string three = format_csv(run(smoke(), in_memory(3)));
  CHECK(one == three);
  CHECK(one.rfind(std::string(kCsvHeader) + "\n", 0) == 0);

  RunOptions reseeded = in_memory(1);
  reseeded.seed = 8;
  CHECK(format_csv(run(smoke(), reseeded)) != one);
}

TEST_CASE("CSV rows carry every column", "[experiments]") {
  std::istringstream in(format_csv(smoke_report()));
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
  }
  std::size_t expected = 0;
  for (const auto& s : smoke_report().suites) expected += s.rows.size();
  CHECK(rows == expected);
}

TEST_CASE("JSON report echoes inputs and verdicts", "[experiments]") {
  const nlohmann::json j = to_json(smoke_report());
  CHECK(j["csv_schema"] == kCsvSchema);
  CHECK(j["csv_columns"] == kCsvHeader);
  CHECK(j["master_seed"] == 7);
  CHECK(j["passed"] == true);
  REQUIRE(j["suites"].size() == 6);
  const auto& conv = j["suites"][0];
  CHECK(conv["name"] == "conv");
  CHECK(conv["kind"] == "convergence");
  CHECK(conv.contains("input"));
  CHECK(conv["rows"].size() == 3);
  CHECK(conv["fits"].contains("convergence"));
  CHECK(conv.contains("wall_seconds"));
}

TEST_CASE("plot data from a report", "[experiments]") {
  const std::string text = plot_data(to_json(smoke_report()).dump());
  CHECK(text.find("# suite conv series convergence\n") != std::string::npos);
  CHECK(text.find("# n estimate std_error\n") != std::string::npos);
  CHECK(text.find("\n\n\n# suite") != std::string::npos);
  CHECK_THROWS_AS(plot_data("not json"), ConfigError);
  CHECK_THROWS_AS(plot_data("{\"rows\": []}"), ConfigError);
}

TEST_CASE("outputs are written atomically", "[experiments]") {
  const fs::path dir = scratch("outputs");
  RunOptions opts;
  opts.workers = 2;
  opts.output_directory = dir.string();
  const ExperimentReport rep = run(smoke(), opts);
  CHECK(rep.output_directory == dir.string());
  CHECK(rep.written_files.size() == 3);
  CHECK(slurp(dir / "results.csv") == format_csv(smoke_report()));
  CHECK(slurp(dir / "zv_solution.csv") == rep.suites[5].solution_csv);
  CHECK(nlohmann::json::parse(slurp(dir / "report.json"))["suites"].size() == 6);
  for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().extension() != ".tmp");

  write_file_atomic((dir / "note.txt").string(), "first");
  write_file_atomic((dir / "note.txt").string(), "second");
  CHECK(slurp(dir / "note.txt") == "second");
  CHECK_THROWS(write_file_atomic("/nonexistent/emrates/x.txt", "x"));
  fs::remove_all(dir);
}

TEST_CASE("output directory resolution", "[experiments]") {
  ExperimentConfig cfg = load_config_string(convergence_config("drift = zero", "min_slope = 0.5"));
  RunOptions opts;
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output_directory(cfg, opts) == kDefaultOutputDir);
  ::setenv(kOutputDirEnv, "from_env", 1);
  CHECK(resolve_output_directory(cfg, opts) == "from_env");
  cfg.output_directory = "from_config";
  CHECK(resolve_output_directory(cfg, opts) == "from_config");
  opts.output_directory = "from_cli";
  CHECK(resolve_output_directory(cfg, opts) == "from_cli");
  ::unsetenv(kOutputDirEnv);
}
