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

#include <cstdint>
#include <span>
#include <vector>

#include "emrates/linalg.hpp"
#include "emrates/rng.hpp"

namespace emrates {

/// Uniform grid t_k = k T / n, k = 0..n.
class TimeGrid {
 public:
  TimeGrid(std::int64_t steps, double horizon);

  std::int64_t steps() const noexcept { return steps_; }
  double horizon() const noexcept { return horizon_; }
  double step() const noexcept { return horizon_ / static_cast<double>(steps_); }

  /// t_k; node(steps()) is exactly T.
  double node(std::int64_t k) const noexcept {
    return k == steps_ ? horizon_ : static_cast<double>(k) * horizon_ / static_cast<double>(steps_);
  }

  /// Index k with kappa(t) = t_k, i.e. t in [t_k, t_{k+1}). At the horizon the
  /// last interval is taken as closed, so kappa(T) = t_{n-1}.
  std::int64_t kappa_index(double t) const;
  double kappa(double t) const { return node(kappa_index(t)); }

  /// Index k with node(k) == t up to rounding; throws if t is not a node.
  std::int64_t node_index(double t) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  std::int64_t steps_;
  double horizon_;
};

/// A d-dimensional Brownian path sampled at the nodes of a grid.
///
/// The path is stored by its node values B_{t_k} (B_0 = 0), which are the
/// left-to-right partial sums of the Gaussian increments drawn at sampling
/// time. Coarsening keeps every m-th node, so partial sums at shared nodes are
/// bitwise identical across resolutions and coarsen(coarsen(p, a), b) ==
/// coarsen(p, a b). Increments are differences of stored node values.
class BrownianPath {
 public:
  BrownianPath(TimeGrid grid, int dimension, std::vector<double> node_values);

  /// Path whose increments are the given rows (k-major, d entries per step),
  /// accumulated left to right.
  static BrownianPath from_increments(TimeGrid grid, int dimension, std::span<const double> increments);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dimension() const noexcept { return dim_; }

  /// B_{t_k}.
  Vec value(std::int64_t k) const noexcept {
    Vec v{};
    for (int i = 0; i < dim_; ++i) v[i] = nodes_[static_cast<std::size_t>(k) * dim_ + i];
    return v;
  }

  /// B_{t_k} component i.
  double value(std::int64_t k, int i) const noexcept {
    return nodes_[static_cast<std::size_t>(k) * dim_ + i];
  }

  /// B_{t_{k+1}} - B_{t_k}.
  Vec increment(std::int64_t k) const noexcept {
    Vec v{};
    for (int i = 0; i < dim_; ++i)
      v[i] = nodes_[static_cast<std::size_t>(k + 1) * dim_ + i] - nodes_[static_cast<std::size_t>(k) * dim_ + i];
    return v;
  }

  std::vector<double> increments() const;
  std::span<const double> node_values() const noexcept { return nodes_; }

 private:
  TimeGrid grid_;
  int dim_;
  std::vector<double> nodes_;
};

/// Draws n d independent N(0, T/n) increments from `rng` (step-major, then
/// component) and accumulates them. Throws InvalidArgument if d < 1.
BrownianPath sample_path(RngStream& rng, const TimeGrid& grid, int d);

/// Keeps every `factor`-th node. Throws InvalidArgument unless factor >= 1
/// divides the number of steps.
BrownianPath coarsen(const BrownianPath& path, std::int64_t factor);

}  // namespace emrates
