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

#include "emrates/scheme.hpp"

#include <cmath>
#include <sstream>

#include "emrates/errors.hpp"

namespace emrates {
namespace {

[[noreturn]] void non_finite(const char* what, const Vec& x, int d, std::int64_t step) {
  std::ostringstream os;
  os << "non-finite " << what << " at coarse step " << step << ", state (";
  for (int i = 0; i < d; ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  throw SimulationError(os.str());
}

struct FrozenCoefficients {
  Vec drift{};
  Mat diffusion{};
};

FrozenCoefficients freeze(const ProblemSpec& problem, const Vec& x, std::int64_t step, bool driftless) {
  const int d = problem.dimension;
  FrozenCoefficients c;
  if (!driftless) {
    c.drift = problem.drift(x);
    if (!all_finite(c.drift, d)) non_finite("drift", x, d, step);
  }
  c.diffusion = problem.diffusion(x);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (!std::isfinite(at(c.diffusion, i, j))) non_finite("diffusion", x, d, step);
  return c;
}

/// x + b dt + sigma dW, the single update shared by every evaluation path so
/// that coarse-node values agree bitwise.
inline Vec advance(const Vec& x, const FrozenCoefficients& c, double dt, const Vec& dw, int d,
                   bool driftless) {
  const Vec noise = apply(c.diffusion, dw, d);
  Vec out{};
  for (int i = 0; i < d; ++i) out[i] = driftless ? x[i] + noise[i] : x[i] + c.drift[i] * dt + noise[i];
  return out;
}

void check_path(const ProblemSpec& problem, const BrownianPath& path, std::int64_t coarse_n) {
  if (path.dimension() != problem.dimension)
    throw InvalidArgument("Brownian path dimension does not match the problem");
  if (std::fabs(path.grid().horizon() - problem.horizon) > 1e-12 * problem.horizon)
    throw InvalidArgument("Brownian path horizon does not match the problem");
  if (coarse_n < 1 || path.grid().steps() % coarse_n != 0)
    throw InvalidArgument("coarse_n = " + std::to_string(coarse_n) +
                          " does not divide the fine step count " + std::to_string(path.grid().steps()));
}

/// With no drift and constant sigma the scheme is x0 + sigma B_t at every
/// time; computing it in that form keeps the values bitwise independent of
/// the grid.
bool closed_form(const ProblemSpec& problem, bool driftless) {
  return (driftless || problem.drift.vanishes) && problem.diffusion.is_constant;
}

Vec closed_form_value(const ProblemSpec& problem, const Mat& sigma, const Vec& w) {
  const int d = problem.dimension;
  const Vec noise = apply(sigma, w, d);
  Vec out{};
  for (int i = 0; i < d; ++i) out[i] = problem.x0[i] + noise[i];
  return out;
}

}  // namespace

EMPath::EMPath(TimeGrid coarse, std::int64_t sub_steps, bool driftless, int dimension,
               std::vector<double> values, BrownianPath noise)
    : coarse_(coarse),
      eval_(coarse.steps() * sub_steps, coarse.horizon()),
      sub_steps_(sub_steps),
      driftless_(driftless),
      dim_(dimension),
      values_(std::move(values)),
      noise_(std::move(noise)) {
  if (values_.size() != static_cast<std::size_t>(eval_.steps() + 1) * dim_)
    throw InvalidArgument("EM path value count does not match its eval grid");
  if (noise_.grid().steps() != eval_.steps())
    throw InvalidArgument("EM path noise must live on the eval grid");
}

EMPath em_path(const ProblemSpec& problem, const BrownianPath& fine_path, std::int64_t coarse_n,
               std::int64_t sub_steps, bool driftless) {
  check_path(problem, fine_path, coarse_n);
  const std::int64_t fine_n = fine_path.grid().steps();
  if (sub_steps == 0) sub_steps = fine_n / coarse_n;
  if (sub_steps < 1 || fine_n % (coarse_n * sub_steps) != 0)
    throw InvalidArgument("coarse_n * sub_steps must divide the fine step count");

  const int d = problem.dimension;
  const std::int64_t eval_n = coarse_n * sub_steps;
  BrownianPath noise = coarsen(fine_path, fine_n / eval_n);
  const double dt = TimeGrid(coarse_n, problem.horizon).step();

  std::vector<double> values(static_cast<std::size_t>(eval_n + 1) * d);
  auto store = [&](std::int64_t j, const Vec& x) {
    for (int i = 0; i < d; ++i) values[static_cast<std::size_t>(j) * d + i] = x[i];
  };
  Vec x = problem.x0;
  store(0, x);
  if (closed_form(problem, driftless)) {
    const Mat sigma = freeze(problem, x, 0, true).diffusion;
    for (std::int64_t j = 1; j <= eval_n; ++j) store(j, closed_form_value(problem, sigma, noise.value(j)));
    return EMPath(TimeGrid(coarse_n, problem.horizon), sub_steps, driftless, d, std::move(values),
                  std::move(noise));
  }
  for (std::int64_t k = 0; k < coarse_n; ++k) {
    const FrozenCoefficients c = freeze(problem, x, k, driftless);
    const std::int64_t base = k * sub_steps;
    const Vec w0 = noise.value(base);
    Vec next{};
    for (std::int64_t j = 1; j <= sub_steps; ++j) {
      const double frac = j == sub_steps ? 1.0 : static_cast<double>(j) / static_cast<double>(sub_steps);
      const Vec w = noise.value(base + j);
      Vec dw{};
      for (int i = 0; i < d; ++i) dw[i] = w[i] - w0[i];
      next = advance(x, c, frac * dt, dw, d, driftless);
      store(base + j, next);
    }
    if (!all_finite(next, d)) non_finite("state", next, d, k + 1);
    x = next;
  }
  return EMPath(TimeGrid(coarse_n, problem.horizon), sub_steps, driftless, d, std::move(values),
                std::move(noise));
}

Vec em_terminal(const ProblemSpec& problem, const BrownianPath& fine_path, std::int64_t coarse_n,
                bool driftless) {
  check_path(problem, fine_path, coarse_n);
  const int d = problem.dimension;
  const std::int64_t stride = fine_path.grid().steps() / coarse_n;
  const double dt = TimeGrid(coarse_n, problem.horizon).step();
  Vec x = problem.x0;
  if (closed_form(problem, driftless))
    return closed_form_value(problem, freeze(problem, x, 0, true).diffusion,
                             fine_path.value(fine_path.grid().steps()));
  for (std::int64_t k = 0; k < coarse_n; ++k) {
    const FrozenCoefficients c = freeze(problem, x, k, driftless);
    const Vec w0 = fine_path.value(k * stride);
    const Vec w1 = fine_path.value((k + 1) * stride);
    Vec dw{};
    for (int i = 0; i < d; ++i) dw[i] = w1[i] - w0[i];
    x = advance(x, c, dt, dw, d, driftless);
    if (!all_finite(x, d)) non_finite("state", x, d, k + 1);
  }
  return x;
}

std::pair<Vec, Vec> em_terminal_pair(const ProblemSpec& problem, std::int64_t coarse_n,
                                     std::int64_t fine_n, RngStream& rng) {
  if (coarse_n < 1 || fine_n % coarse_n != 0)
    throw InvalidArgument("coarse_n must divide fine_n");
  const BrownianPath path = sample_path(rng, TimeGrid(fine_n, problem.horizon), problem.dimension);
  return {em_terminal(problem, path, coarse_n), em_terminal(problem, path, fine_n)};
}

GirsanovWeight girsanov_weight(const EMPath& y, const DriftSpec& drift, const DiffusionSpec& diffusion,
                               double q) {
  if (!y.driftless()) throw InvalidArgument("Girsanov weight needs the driftless scheme path");
  const int d = y.dimension();
  if (drift.dimension != d || diffusion.dimension != d)
    throw InvalidArgument("coefficient dimension does not match the path");
  const std::int64_t n = y.coarse_grid().steps();
  const std::int64_t m = y.sub_steps();
  const double dt = y.coarse_grid().step();
  const double det_floor = std::pow(diffusion.ellipticity_lambda, -0.5 * d) * (1.0 - 1e-9);

  GirsanovWeight w;
  w.q = q;
  w.steps = n;
  for (std::int64_t k = 0; k < n; ++k) {
    const Vec yk = y.coarse_value(k);
    const Vec b = drift(yk);
    if (!all_finite(b, d)) non_finite("drift", yk, d, k);
    Vec v{};
    if (!solve_small(diffusion(yk), b, d, det_floor, v)) {
      std::ostringstream os;
      os << "diffusion matrix numerically singular at coarse step " << k
         << " (|det sigma| below lambda^{-d/2} = " << det_floor << ")";
      throw EllipticityError(os.str());
    }
    const Vec w0 = y.noise().value(k * m);
    const Vec w1 = y.noise().value((k + 1) * m);
    Vec db{};
    for (int i = 0; i < d; ++i) db[i] = w1[i] - w0[i];
    w.s1 += dot(v, db, d);
    w.s2 += dot(v, v, d) * dt;
  }
  w.log_weight = w.log_weight_at(q);
  return w;
}

double quadrature_functional(const EMPath& path, const TestFunctionSpec& fns, double s, double t) {
  const TimeGrid& grid = path.eval_grid();
  const std::int64_t first = grid.node_index(s);
  const std::int64_t last = grid.node_index(t);
  if (first > last) throw InvalidArgument("quadrature needs s <= t");
  const std::int64_t m = path.sub_steps();
  double sum = 0.0;
  std::int64_t cached_k = -1;
  double f_frozen = 0.0;
  for (std::int64_t j = first; j < last; ++j) {
    const std::int64_t k = j / m;
    if (k != cached_k) {
      f_frozen = fns.f(path.coarse_value(k));
      cached_k = k;
    }
    const Vec x = path.value(j);
    sum += (fns.f(x) - f_frozen) * fns.g(x);
  }
  return sum * grid.step();
}

}  // namespace emrates
