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

#include "emrates/emrates.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "emrates/config.hpp"
#include "emrates/errors.hpp"
#include "emrates/estimators.hpp"
#include "emrates/experiments.hpp"

struct emrates_config {
  emrates::ExperimentConfig config;
  std::vector<std::string> violations;
};

struct emrates_report {
  emrates::ExperimentReport report;
};

struct emrates_problem {
  emrates::ProblemSpec problem;
};

namespace {

thread_local std::string last_error;

emrates_status fail(emrates_status status, const std::string& message) {
  last_error = message;
  return status;
}

/// Maps the exception in flight to a status code.
emrates_status translate() {
  try {
    throw;
  } catch (const emrates::ConfigError& e) {
    return fail(EMRATES_CONFIG_ERROR, e.what());
  } catch (const emrates::InvalidArgument& e) {
    return fail(EMRATES_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EMRATES_RUNTIME_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(EMRATES_RUNTIME_ERROR, e.what());
  } catch (...) {
    return fail(EMRATES_RUNTIME_ERROR, "unknown error");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
emrates_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (...) {
    return translate();
  }
}

}  // namespace

extern "C" {

const char* emrates_version(void) { return EMRATES_VERSION_STRING; }

const char* emrates_last_error(void) { return last_error.c_str(); }

void emrates_string_free(char* s) { std::free(s); }

emrates_status emrates_config_load_file(const char* path, emrates_config** out) {
  if (!out) return fail(EMRATES_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (!path) return fail(EMRATES_INVALID_ARGUMENT, "path is NULL");
  return guarded([&] {
    *out = new emrates_config{emrates::load_config_file(path), {}};
    return EMRATES_OK;
  });
}

emrates_status emrates_config_load_string(const char* text, emrates_config** out) {
  if (!out) return fail(EMRATES_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (!text) return fail(EMRATES_INVALID_ARGUMENT, "text is NULL");
  return guarded([&] {
    *out = new emrates_config{emrates::load_config_string(text), {}};
    return EMRATES_OK;
  });
}

void emrates_config_free(emrates_config* config) { delete config; }

emrates_status emrates_config_validate(emrates_config* config, size_t* violation_count) {
  if (!config || !violation_count) return fail(EMRATES_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    config->violations = emrates::validate(config->config);
    *violation_count = config->violations.size();
    return EMRATES_OK;
  });
}

const char* emrates_config_violation(const emrates_config* config, size_t index) {
  if (!config || index >= config->violations.size()) return nullptr;
  return config->violations[index].c_str();
}

emrates_status emrates_run(const emrates_config* config, unsigned workers, const uint64_t* seed_override,
                           const char* out_dir, emrates_report** out) {
  if (!out) return fail(EMRATES_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (!config) return fail(EMRATES_INVALID_ARGUMENT, "config is NULL");
  return guarded([&] {
    emrates::RunOptions opts;
    opts.workers = static_cast<int>(workers);
    if (seed_override) opts.seed = *seed_override;
    if (out_dir) opts.output_directory = out_dir;
    auto report = std::make_unique<emrates_report>(emrates_report{emrates::run(config->config, opts)});
    const bool passed = report->report.passed();
    *out = report.release();
    if (!passed) {
      last_error = "one or more acceptance thresholds failed";
      return EMRATES_CRITERIA_FAILED;
    }
    return EMRATES_OK;
  });
}

void emrates_report_free(emrates_report* report) { delete report; }

int emrates_report_passed(const emrates_report* report) { return report && report->report.passed() ? 1 : 0; }

emrates_status emrates_report_json(const emrates_report* report, char** out) {
  if (out) *out = nullptr;
  if (!report || !out) return fail(EMRATES_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    *out = duplicate(emrates::to_json(report->report).dump(2) + "\n");
    return EMRATES_OK;
  });
}

emrates_status emrates_report_csv(const emrates_report* report, char** out) {
  if (out) *out = nullptr;
  if (!report || !out) return fail(EMRATES_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    *out = duplicate(emrates::format_csv(report->report));
    return EMRATES_OK;
  });
}

const char* emrates_report_output_directory(const emrates_report* report) {
  return report ? report->report.output_directory.c_str() : nullptr;
}

emrates_status emrates_plot_data(const char* report_json, char** out) {
  if (out) *out = nullptr;
  if (!report_json || !out) return fail(EMRATES_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    *out = duplicate(emrates::plot_data(report_json));
    return EMRATES_OK;
  });
}

emrates_status emrates_problem_create(const char* drift, const double* drift_params, size_t drift_param_count,
                                      const char* diffusion, const double* diffusion_params,
                                      size_t diffusion_param_count, int dimension, const double* x0,
                                      size_t x0_count, double horizon, emrates_problem** out) {
  if (!out) return fail(EMRATES_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  if (!drift || !diffusion || (drift_param_count && !drift_params) ||
      (diffusion_param_count && !diffusion_params) || (x0_count && !x0))
    return fail(EMRATES_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    emrates::ProblemBlock block;
    block.drift = drift;
    block.drift_params.assign(drift_params, drift_params + drift_param_count);
    block.diffusion = diffusion;
    block.diffusion_params.assign(diffusion_params, diffusion_params + diffusion_param_count);
    block.dimension = dimension;
    block.x0.assign(x0, x0 + x0_count);
    block.horizon = horizon;
    *out = new emrates_problem{block.build()};
    return EMRATES_OK;
  });
}

void emrates_problem_free(emrates_problem* problem) { delete problem; }

emrates_status emrates_strong_error(const emrates_problem* problem, int64_t coarse_n, int64_t fine_n,
                                    double p, int64_t replicas, uint64_t seed, unsigned workers,
                                    double* estimate, double* std_error) {
  if (!problem || !estimate || !std_error) return fail(EMRATES_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto r = emrates::strong_error(problem->problem, coarse_n, fine_n, p, replicas, seed,
                                         emrates::Execution{workers});
    *estimate = r.estimate;
    *std_error = r.std_error;
    return EMRATES_OK;
  });
}

}  // extern "C"
