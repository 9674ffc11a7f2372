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

// Monte Carlo estimators over replica-parallel simulations. Replica i always
// draws from derive_stream(seed, i), and every reduction runs in replica
// order, so results are a pure function of the arguments.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emrates/coefficients.hpp"
#include "emrates/parallel.hpp"

namespace emrates {

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t replicas = 0;
  double moment_order = 1.0;
  /// Central confidence interval (normal approximation unless the producing
  /// estimator documents otherwise).
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  std::int64_t steps = 0;
  double horizon = 0.0;
  std::string label;
  /// Bootstrap std error of the estimate; NaN unless resamples were requested.
  double bootstrap_std_error = std::numeric_limits<double>::quiet_NaN();
};

struct CurvePoint {
  std::int64_t n = 0;
  MonteCarloResult result;
};

struct StrongErrorCurve {
  std::string label;
  double moment_order = 2.0;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::vector<CurvePoint> points;
};

enum class FitStatus { ok, exact_scheme };

struct RateFit {
  FitStatus status = FitStatus::ok;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double slope_ci_lower = 0.0;  ///< 95% Student-t interval
  double slope_ci_upper = 0.0;
  double r_squared = 1.0;
  std::int64_t points_used = 0;
  /// Abscissae of points left out by the exclusion rule.
  std::vector<double> excluded;
};

/// (E|X^{fine}_T - X^{coarse}_T|^p)^{1/p}, both schemes driven by one path
/// per replica. The std error is the delta-method value on the 1/p scale.
MonteCarloResult strong_error(const ProblemSpec& problem, std::int64_t coarse_n, std::int64_t fine_n,
                              double p, std::int64_t replicas, std::uint64_t seed,
                              const Execution& exec = {});

/// strong_error for every n in n_list with common random numbers: each
/// replica samples one path at fine_n and every level is coarsened from it.
/// Entry n is bitwise equal to strong_error(problem, n, fine_n, ...).
/// `bootstrap_resamples` > 0 also fills bootstrap_std_error at every level.
StrongErrorCurve strong_error_curve(const ProblemSpec& problem, std::span<const std::int64_t> n_list,
                                    std::int64_t fine_n, double p, std::int64_t replicas,
                                    std::uint64_t seed, const Execution& exec = {},
                                    int bootstrap_resamples = 0);

/// L^p norm at t = T of the occupation-time quadrature functional for each n,
/// with eval grid n * m_sub. Uses the driftless scheme when `driftless`.
StrongErrorCurve quadrature_decay(const ProblemSpec& problem, const TestFunctionSpec& fns,
                                  std::span<const std::int64_t> n_list, std::int64_t m_sub, double p,
                                  std::int64_t replicas, std::uint64_t seed, bool driftless,
                                  const Execution& exec = {}, int bootstrap_resamples = 0);

struct MomentPoint {
  std::int64_t start = 0;  ///< node index of s
  std::int64_t end = 0;    ///< node index of t
  double lag = 0.0;        ///< t - s
  MonteCarloResult moment;  ///< E|X_t - X_s|^p (not p-th rooted)
};

struct MomentScaling {
  double moment_order = 2.0;
  std::vector<MomentPoint> points;
  RateFit fit;  ///< slope of log E|X_t - X_s|^p against log(t - s)
  MonteCarloResult sup_moment;  ///< max over nodes t_k of E|X_{t_k}|^p
  std::int64_t sup_node = 0;
};

/// Increment moments on the n-step scheme for node pairs (s, t), plus the
/// largest node moment E|X_{t_k}|^p. Throws InvalidArgument with fewer than
/// 3 usable points for the fit.
MomentScaling moment_scaling(const ProblemSpec& problem, std::int64_t n, double p,
                             std::span<const std::pair<std::int64_t, std::int64_t>> node_pairs,
                             std::int64_t replicas, std::uint64_t seed, const Execution& exec = {});

/// max_k E|X_{t_k}^n|^p with the node attaining it.
std::pair<MonteCarloResult, std::int64_t> sup_moment(const ProblemSpec& problem, std::int64_t n,
                                                     double p, std::int64_t replicas,
                                                     std::uint64_t seed, const Execution& exec = {});

/// L^p norm of int_s^t {f(X_r) - f(X_{kappa(r)})} g(X_r) dr for the n-step
/// scheme on an eval grid of n * m_sub steps.
MonteCarloResult crude_quadrature_bound(const ProblemSpec& problem, const TestFunctionSpec& fns,
                                        std::int64_t n, double s, double t, double p,
                                        std::int64_t replicas, std::uint64_t seed,
                                        std::int64_t m_sub = 16, const Execution& exec = {});

/// Frequency of |Y_r - Y_{kappa(r)}| > 1 for the driftless n-step scheme.
/// The interval is Clopper-Pearson at `level`; moment_order is 1.
MonteCarloResult tail_probability(const ProblemSpec& problem, std::int64_t n, double r,
                                  std::int64_t replicas, std::uint64_t seed, double level = 0.99,
                                  const Execution& exec = {});

struct GirsanovMomentRow {
  double q = 0.0;
  double p = 1.0;
  std::int64_t n = 0;
  MonteCarloResult moment;  ///< E[Z_T(q, n)^p]
};

struct GirsanovTable {
  std::vector<GirsanovMomentRow> rows;
  double max_log_weight = 0.0;  ///< largest p log Z over all replicas and rows
  std::int64_t capped = 0;      ///< replica/row pairs with p log Z above the cap
};

/// E[Z_T(q, n)^p] over the driftless scheme for each (p, n), with common
/// random numbers across n. Weights are handled in log space; replicates with
/// p log Z above `log_weight_cap` are counted in `capped`.
GirsanovTable girsanov_moments(const ProblemSpec& problem, double q, std::span<const double> p_list,
                               std::span<const std::int64_t> n_list, std::int64_t replicas,
                               std::uint64_t seed, double log_weight_cap = 700.0,
                               const Execution& exec = {});

/// (E[phi(X_T^n)], E[phi(Y_T^n) Z_T(1, n)]) on independent replica sets
/// (streams 2i and 2i + 1). Equal in expectation by the change of measure.
std::pair<MonteCarloResult, MonteCarloResult> girsanov_reweighting(
    const ProblemSpec& problem, const std::function<double(const Vec&)>& phi, std::int64_t n,
    std::int64_t replicas, std::uint64_t seed, const Execution& exec = {});

/// Decay rate of the curve: OLS of log estimate on log n, reported as the
/// negated slope. Points with estimate <= 0 or estimate < 3 std_error are
/// excluded. An all-zero curve returns FitStatus::exact_scheme; fewer than 3
/// usable points otherwise throws InvalidArgument.
RateFit fit_rate(const StrongErrorCurve& curve);

/// Shared log-log fit with the exclusion rule; slope is not negated.
RateFit fit_power_law(std::span<const double> abscissae, std::span<const MonteCarloResult> values);

}  // namespace emrates
