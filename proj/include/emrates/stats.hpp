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

// Statistical helpers shared by the estimators. All reductions run in index
// order so results do not depend on how replicas were scheduled.

#include <cstdint>
#include <span>
#include <utility>

namespace emrates::stats {

struct SampleSummary {
  double mean = 0.0;
  double stddev = 0.0;  ///< unbiased (n - 1) sample standard deviation
  std::int64_t count = 0;
};

SampleSummary summarize(std::span<const double> values);

/// L^p norm estimate from per-replica values v_i = |D_i|^p:
/// estimate = mean(v)^{1/p}, std error by the first-order delta method
/// (1/p) mean^{1/p - 1} sd(v)/sqrt(N). A zero mean gives (0, 0).
std::pair<double, double> lp_norm_from_powers(std::span<const double> powers, double p);

/// Std error of the L^p estimate by nonparametric bootstrap.
double bootstrap_lp_stderr(std::span<const double> powers, double p, int resamples,
                           std::uint64_t seed);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 1.0;
  std::int64_t points = 0;
};

/// Ordinary least squares y = intercept + slope x (needs >= 2 points with
/// distinct x). slope_stderr uses the residual variance with n - 2 degrees
/// of freedom (0 for two points).
LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);
/// Quantile of Student's t with `dof` degrees of freedom.
double student_t_quantile(double probability, double dof);
/// Two-sided standard normal quantile for a central interval of `level`.
double normal_two_sided_quantile(double level);

/// Clopper-Pearson interval for `successes` out of `trials` at `level`.
std::pair<double, double> clopper_pearson(std::int64_t successes, std::int64_t trials, double level);

/// P(|N(0, variance I_d)| > threshold).
double gaussian_norm_tail(int d, double variance, double threshold);

}  // namespace emrates::stats
