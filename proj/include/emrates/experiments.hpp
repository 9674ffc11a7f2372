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

#pragma once

// Config-driven experiment runner: assembles problems from the catalogue,
// runs each suite, and writes CSV rows and a JSON report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emrates/config.hpp"
#include "emrates/estimators.hpp"

namespace emrates {

inline constexpr const char* kCsvSchema = "emrates-csv-1";
inline constexpr const char* kCsvHeader = "experiment,n,estimate,std_error,replicas,p,seed";
inline constexpr const char* kOutputDirEnv = "EMRATES_OUT_DIR";
inline constexpr const char* kDefaultOutputDir = "emrates_out";

struct CsvRow {
  std::string experiment;
  std::int64_t n = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t replicas = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
};

struct Verdict {
  std::string key;  ///< threshold key in the config
  std::string quantity;
  std::string relation;  ///< ">=", "<=", "<", "==", "in"
  double observed = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string note;
};

struct SuiteReport {
  SuiteConfig input;
  std::uint64_t seed = 0;
  std::vector<CsvRow> rows;
  std::vector<std::pair<std::string, RateFit>> fits;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  nlohmann::json details = nlohmann::json::object();
  std::string solution_csv;  ///< zvonkin: mesh solution (x,u,du,d2u)
  double wall_seconds = 0.0;

  bool passed() const;
};

struct ExperimentReport {
  std::string version;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<SuiteReport> suites;
  std::string output_directory;
  std::vector<std::string> written_files;

  bool passed() const;
};

struct RunOptions {
  int workers = 0;  ///< 0 selects hardware concurrency; never affects results
  std::optional<std::string> output_directory;
  std::optional<std::uint64_t> seed;
  bool write_outputs = true;
};

/// --out, then the config's output.directory, then $EMRATES_OUT_DIR, then
/// the default.
std::string resolve_output_directory(const ExperimentConfig& config, const RunOptions& options);

/// Runs every suite in order. Throws ConfigError if validate() reports
/// anything; simulation failures propagate as SimulationError or
/// InvalidArgument. Output files are written via a temporary file and rename.
ExperimentReport run(const ExperimentConfig& config, const RunOptions& options = {});

/// Runs one suite without writing anything.
SuiteReport run_suite(const SuiteConfig& suite, std::uint64_t seed, const Execution& exec);

/// CSV text: header line, then one row per curve point in suite order.
std::string format_csv(const ExperimentReport& report);
nlohmann::json to_json(const ExperimentReport& report);

/// Gnuplot-ready whitespace columns (one index block per series) from a
/// report produced by to_json. Throws ConfigError on malformed input.
std::string plot_data(const std::string& report_json);

/// Writes `contents` to `path` through `path.tmp` and an atomic rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace emrates
