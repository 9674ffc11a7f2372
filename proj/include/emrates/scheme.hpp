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

// Euler-Maruyama scheme with coefficients frozen at the nodes of a coarse
// grid:
//
//   X_r = X_{kappa(r)} + b(X_{kappa(r)}) (r - kappa(r)) + sigma(X_{kappa(r)}) (B_r - B_{kappa(r)}),
//
// evaluated on a sub-grid with `sub_steps` points per coarse step. The
// driftless scheme Y sets b = 0.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "emrates/brownian.hpp"
#include "emrates/coefficients.hpp"

namespace emrates {

class EMPath {
 public:
  EMPath(TimeGrid coarse, std::int64_t sub_steps, bool driftless, int dimension,
         std::vector<double> values, BrownianPath noise);

  const TimeGrid& coarse_grid() const noexcept { return coarse_; }
  const TimeGrid& eval_grid() const noexcept { return eval_; }
  std::int64_t sub_steps() const noexcept { return sub_steps_; }
  bool driftless() const noexcept { return driftless_; }
  int dimension() const noexcept { return dim_; }

  /// X at eval node j.
  Vec value(std::int64_t j) const noexcept {
    Vec v{};
    for (int i = 0; i < dim_; ++i) v[i] = values_[static_cast<std::size_t>(j) * dim_ + i];
    return v;
  }
  /// X at coarse node k.
  Vec coarse_value(std::int64_t k) const noexcept { return value(k * sub_steps_); }
  Vec terminal() const noexcept { return value(eval_.steps()); }

  /// Driving Brownian path on the eval grid.
  const BrownianPath& noise() const noexcept { return noise_; }

 private:
  TimeGrid coarse_;
  TimeGrid eval_;
  std::int64_t sub_steps_;
  bool driftless_;
  int dim_;
  std::vector<double> values_;
  BrownianPath noise_;
};

/// Scheme driven by `fine_path` with coefficients frozen on the grid of
/// `coarse_n` steps and values stored at `sub_steps` points per coarse step
/// (0 selects every node of the fine path). Requires coarse_n * sub_steps to
/// divide the fine step count. Values at coarse nodes do not depend on
/// `sub_steps`. Throws SimulationError on a non-finite coefficient or state.
EMPath em_path(const ProblemSpec& problem, const BrownianPath& fine_path, std::int64_t coarse_n,
               std::int64_t sub_steps = 0, bool driftless = false);

/// X^{coarse_n}_T driven by `fine_path` without storing the trajectory.
/// Bitwise equal to em_path(problem, fine_path, coarse_n).terminal().
Vec em_terminal(const ProblemSpec& problem, const BrownianPath& fine_path, std::int64_t coarse_n,
                bool driftless = false);

/// (X^{coarse_n}_T, X^{fine_n}_T) driven by one Brownian path of fine_n steps
/// drawn from `rng`.
std::pair<Vec, Vec> em_terminal_pair(const ProblemSpec& problem, std::int64_t coarse_n,
                                     std::int64_t fine_n, RngStream& rng);

struct GirsanovWeight {
  double q = 0.0;
  std::int64_t steps = 0;
  double s1 = 0.0;  ///< sum_k <sigma^{-1} b (Y_{t_k}), Delta B_k>
  double s2 = 0.0;  ///< sum_k |sigma^{-1} b (Y_{t_k})|^2 T/n
  double log_weight = 0.0;

  double weight() const { return std::exp(log_weight); }
  /// log Z(q', n) for another q' from the same sums.
  double log_weight_at(double other_q) const { return other_q * s1 - 0.5 * other_q * other_q * s2; }
};

/// Z_T(q, n) along a driftless scheme path. Throws InvalidArgument if the
/// path carries a drift and EllipticityError if |det sigma(Y_{t_k})| falls
/// below the bound lambda^{-d/2} implied by the declared ellipticity constant.
GirsanovWeight girsanov_weight(const EMPath& driftless, const DriftSpec& drift,
                               const DiffusionSpec& diffusion, double q);

/// Left-endpoint Riemann sum on the eval grid of
///   int_s^t {f(X_r) - f(X_{kappa(r)})} g(X_r) dr.
/// s and t must be eval-grid nodes with s <= t.
double quadrature_functional(const EMPath& path, const TestFunctionSpec& fns, double s, double t);
inline double quadrature_functional(const EMPath& path, const TestFunctionSpec& fns, double t) {
  return quadrature_functional(path, fns, 0.0, t);
}

}  // namespace emrates
