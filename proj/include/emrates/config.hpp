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

// Experiment configuration.
//
// Grammar: INI sections of `key = value` lines, `;` or `#` comments, lists
// separated by whitespace. A single-suite file uses the sections
//
//   [experiment]  kind, seed
//   [problem]     drift, drift_params, diffusion, diffusion_params, dimension, x0, horizon
//   [schedule]    n_list, fine_n, m_sub, p, p_list, replicas, driftless, bootstrap, moment_n,
//                 lags, anchor, q, time, level, lambda, lambda_list, radius, mesh_width
//   [functional]  f, f_params, g, g_params
//   [thresholds]  numeric thresholds, each one asserted when present
//   [output]      directory, formats
//
// With `kind = all`, `[experiment] suites = a b ...` names the suites and
// each suite reads the prefixed sections `[a.experiment]`, `[a.problem]`, ...
// (a missing prefixed section falls back to the whole unprefixed section).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emrates/coefficients.hpp"

namespace emrates {

enum class ExperimentKind { convergence, quadrature, moments, girsanov, tail, zvonkin, all };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view text);

struct ProblemBlock {
  std::string drift = "zero";
  std::vector<double> drift_params;
  std::string diffusion = "identity";
  std::vector<double> diffusion_params;
  int dimension = 1;
  std::vector<double> x0;  ///< one value broadcast to every coordinate, or d values
  double horizon = 1.0;

  /// Throws InvalidArgument for unknown keys or bad parameters.
  ProblemSpec build() const;
};

struct SuiteConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::convergence;
  ProblemBlock problem;

  std::vector<std::int64_t> n_list;
  std::int64_t fine_n = 0;
  std::int64_t m_sub = 16;
  double p = 2.0;
  std::vector<double> p_list;
  std::int64_t replicas = 0;
  bool driftless = true;  ///< quadrature only
  bool bootstrap = false;  ///< convergence, quadrature: bootstrap std errors in the report

  std::int64_t moment_n = 1024;       ///< moments: scheme steps for the increment fit
  std::vector<std::int64_t> lags;     ///< moments: lags in steps
  std::optional<std::int64_t> anchor;  ///< moments: start node (default moment_n / 2)

  double q = 1.0;                 ///< girsanov
  std::optional<double> time;     ///< tail: evaluation time r (default horizon)
  double level = 0.99;            ///< tail: Clopper-Pearson level

  double lambda = 1.0;  ///< zvonkin
  std::vector<double> lambda_list;
  double radius = 8.0;
  double mesh_width = 1e-3;

  std::string f_name = "power";
  std::vector<double> f_params{0.5};
  std::string g_name = "one";
  std::vector<double> g_params;

  std::map<std::string, double> thresholds;
  std::vector<std::string> unknown_keys;  ///< "section.key" entries not in the grammar
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::convergence;
  std::uint64_t seed = 1;
  std::vector<SuiteConfig> suites;
  std::optional<std::string> output_directory;
  std::vector<std::string> formats{"csv", "json"};
  std::vector<std::string> unknown_keys;
};

/// Parses the grammar above. Throws ConfigError on syntax errors or values
/// that are not numbers where numbers are expected; semantic problems are
/// left to validate().
ExperimentConfig load_config_string(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Threshold keys understood by each kind.
std::vector<std::string> known_thresholds(ExperimentKind kind);

/// Every violated precondition of run(); empty iff the config can run.
/// Never throws.
std::vector<std::string> validate(const ExperimentConfig& config);

}  // namespace emrates
