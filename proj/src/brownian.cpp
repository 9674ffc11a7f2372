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

#include "emrates/brownian.hpp"

#include <cmath>
#include <string>

#include "emrates/errors.hpp"

namespace emrates {

TimeGrid::TimeGrid(std::int64_t steps, double horizon) : steps_(steps), horizon_(horizon) {
  if (steps <= 0) throw InvalidArgument("time grid needs n >= 1 steps");
  if (!(std::isfinite(horizon) && horizon > 0.0))
    throw InvalidArgument("time grid horizon must be finite and positive");
}

std::int64_t TimeGrid::kappa_index(double t) const {
  if (!(t >= 0.0 && t <= horizon_ * (1.0 + 1e-12)))
    throw InvalidArgument("time " + std::to_string(t) + " outside [0, T]");
  auto k = static_cast<std::int64_t>(std::floor(t / horizon_ * static_cast<double>(steps_)));
  // Correct for rounding in t / T * n.
  while (k > 0 && node(k) > t) --k;
  while (k + 1 <= steps_ && node(k + 1) <= t) ++k;
  return std::min(k, steps_ - 1);
}

std::int64_t TimeGrid::node_index(double t) const {
  const double x = t / horizon_ * static_cast<double>(steps_);
  const auto k = static_cast<std::int64_t>(std::llround(x));
  if (k < 0 || k > steps_ || std::fabs(x - static_cast<double>(k)) > 1e-9 * std::max(1.0, x))
    throw InvalidArgument("time " + std::to_string(t) + " is not a grid node");
  return k;
}

BrownianPath::BrownianPath(TimeGrid grid, int dimension, std::vector<double> node_values)
    : grid_(grid), dim_(dimension), nodes_(std::move(node_values)) {
  if (dimension < 1 || dimension > kMaxDim)
    throw InvalidArgument("Brownian dimension must be in [1, 3]");
  if (nodes_.size() != static_cast<std::size_t>(grid_.steps() + 1) * dim_)
    throw InvalidArgument("node value count does not match grid and dimension");
}

BrownianPath BrownianPath::from_increments(TimeGrid grid, int dimension,
                                           std::span<const double> increments) {
  const auto n = static_cast<std::size_t>(grid.steps());
  if (increments.size() != n * static_cast<std::size_t>(dimension))
    throw InvalidArgument("increment count does not match grid and dimension");
  std::vector<double> nodes((n + 1) * dimension, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (int i = 0; i < dimension; ++i)
      nodes[(k + 1) * dimension + i] = nodes[k * dimension + i] + increments[k * dimension + i];
  return BrownianPath(grid, dimension, std::move(nodes));
}

std::vector<double> BrownianPath::increments() const {
  const auto n = static_cast<std::size_t>(grid_.steps());
  std::vector<double> out(n * dim_);
  for (std::size_t k = 0; k < n; ++k)
    for (int i = 0; i < dim_; ++i) out[k * dim_ + i] = nodes_[(k + 1) * dim_ + i] - nodes_[k * dim_ + i];
  return out;
}

BrownianPath sample_path(RngStream& rng, const TimeGrid& grid, int d) {
  if (d < 1 || d > kMaxDim) throw InvalidArgument("Brownian dimension must be in [1, 3]");
  const auto n = static_cast<std::size_t>(grid.steps());
  const double scale = std::sqrt(grid.step());
  std::vector<double> nodes((n + 1) * d, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (int i = 0; i < d; ++i) nodes[(k + 1) * d + i] = nodes[k * d + i] + scale * rng.normal();
  return BrownianPath(grid, d, std::move(nodes));
}

BrownianPath coarsen(const BrownianPath& path, std::int64_t factor) {
  const std::int64_t n = path.grid().steps();
  if (factor < 1 || n % factor != 0)
    throw InvalidArgument("coarsening factor " + std::to_string(factor) + " does not divide n = " +
                          std::to_string(n));
  if (factor == 1) return path;
  const int d = path.dimension();
  const std::int64_t coarse = n / factor;
  std::vector<double> nodes(static_cast<std::size_t>(coarse + 1) * d);
  const auto src = path.node_values();
  for (std::int64_t k = 0; k <= coarse; ++k)
    for (int i = 0; i < d; ++i)
      nodes[static_cast<std::size_t>(k) * d + i] = src[static_cast<std::size_t>(k * factor) * d + i];
  return BrownianPath(TimeGrid(coarse, path.grid().horizon()), d, std::move(nodes));
}

}  // namespace emrates
