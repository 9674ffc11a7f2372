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

#ifndef EMRATES_EMRATES_H_
#define EMRATES_EMRATES_H_

/* C interface to the emrates library. Handles are opaque; every function
 * returns a status code and stores a message retrievable with
 * emrates_last_error() (per thread) when it fails. Strings returned through
 * char** out-parameters are owned by the caller and released with
 * emrates_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(EMRATES_BUILDING_LIBRARY)
#define EMRATES_API __attribute__((visibility("default")))
#else
#define EMRATES_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum emrates_status {
  EMRATES_OK = 0,
  EMRATES_CRITERIA_FAILED = 1,
  EMRATES_CONFIG_ERROR = 2,
  EMRATES_RUNTIME_ERROR = 3,
  EMRATES_INVALID_ARGUMENT = 4
} emrates_status;

typedef struct emrates_config emrates_config;
typedef struct emrates_report emrates_report;
typedef struct emrates_problem emrates_problem;

EMRATES_API const char* emrates_version(void);
EMRATES_API const char* emrates_last_error(void);
EMRATES_API void emrates_string_free(char* s);

/* Configs. */
EMRATES_API emrates_status emrates_config_load_file(const char* path, emrates_config** out);
EMRATES_API emrates_status emrates_config_load_string(const char* text, emrates_config** out);
EMRATES_API void emrates_config_free(emrates_config* config);
/* Number of violations; 0 means the config can run. */
EMRATES_API emrates_status emrates_config_validate(emrates_config* config, size_t* violation_count);
/* Violation i of the last emrates_config_validate call; NULL if out of range.
 * Valid until the next validate call or emrates_config_free. */
EMRATES_API const char* emrates_config_violation(const emrates_config* config, size_t index);

/* Runs every suite. workers = 0 selects hardware concurrency; seed_override
 * and out_dir may be NULL. Returns EMRATES_OK or EMRATES_CRITERIA_FAILED with
 * *out set, or an error code with *out set to NULL. */
EMRATES_API emrates_status emrates_run(const emrates_config* config, unsigned workers,
                                       const uint64_t* seed_override, const char* out_dir,
                                       emrates_report** out);
EMRATES_API void emrates_report_free(emrates_report* report);
EMRATES_API int emrates_report_passed(const emrates_report* report);
EMRATES_API emrates_status emrates_report_json(const emrates_report* report, char** out);
EMRATES_API emrates_status emrates_report_csv(const emrates_report* report, char** out);
/* Output directory the run resolved (valid for the report's lifetime). */
EMRATES_API const char* emrates_report_output_directory(const emrates_report* report);

/* Gnuplot-ready columns from the text of a JSON report. */
EMRATES_API emrates_status emrates_plot_data(const char* report_json, char** out);

/* Problems from the coefficient catalogue. x0 has one value (broadcast) or
 * dimension values; params arrays may be NULL when their count is 0. */
EMRATES_API emrates_status emrates_problem_create(const char* drift, const double* drift_params,
                                                  size_t drift_param_count, const char* diffusion,
                                                  const double* diffusion_params,
                                                  size_t diffusion_param_count, int dimension,
                                                  const double* x0, size_t x0_count, double horizon,
                                                  emrates_problem** out);
EMRATES_API void emrates_problem_free(emrates_problem* problem);

/* (E|X^fine_T - X^coarse_T|^p)^(1/p) with its delta-method standard error. */
EMRATES_API emrates_status emrates_strong_error(const emrates_problem* problem, int64_t coarse_n,
                                                int64_t fine_n, double p, int64_t replicas,
                                                uint64_t seed, unsigned workers, double* estimate,
                                                double* std_error);

#ifdef __cplusplus
}
#endif

#endif /* EMRATES_EMRATES_H_ */
