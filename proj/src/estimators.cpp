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

#include "emrates/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "emrates/brownian.hpp"
#include "emrates/errors.hpp"
#include "emrates/scheme.hpp"
#include "emrates/stats.hpp"

namespace emrates {
namespace {

constexpr double kZ95 = 1.959963984540054;

void check_replicas(std::int64_t replicas, std::int64_t minimum = 2) {
  if (replicas < minimum)
    throw InvalidArgument("need at least " + std::to_string(minimum) + " replicas");
}

void check_order(double p) {
  if (!(p >= 1.0)) throw InvalidArgument("moment order p must be >= 1");
}

/// n_list strictly increasing, each entry dividing `top`.
void check_levels(std::span<const std::int64_t> n_list, std::int64_t top, const char* top_name) {
  if (n_list.empty()) throw InvalidArgument("n_list must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw InvalidArgument("n_list entries must be >= 1");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw InvalidArgument("n_list must be strictly increasing");
    if (top % n_list[i] != 0)
      throw InvalidArgument(std::string(top_name) + " not a multiple of n=" + std::to_string(n_list[i]));
  }
}

MonteCarloResult lp_result(std::span<const double> powers, double p, std::int64_t steps,
                           double horizon, std::string label) {
  const auto [estimate, se] = stats::lp_norm_from_powers(powers, p);
  MonteCarloResult r;
  r.estimate = estimate;
  r.std_error = se;
  r.replicas = static_cast<std::int64_t>(powers.size());
  r.moment_order = p;
  r.ci_lower = std::max(0.0, estimate - kZ95 * se);
  r.ci_upper = estimate + kZ95 * se;
  r.steps = steps;
  r.horizon = horizon;
  r.label = std::move(label);
  return r;
}

/// Bootstrap error for level `level` of a curve, from a stream disjoint from
/// the replica streams.
void add_bootstrap(MonteCarloResult& r, std::span<const double> powers, double p, int resamples,
                   std::uint64_t seed, std::size_t level) {
  if (resamples <= 0) return;
  RngStream derive(seed, (std::uint64_t{1} << 62) | level);
  r.bootstrap_std_error = stats::bootstrap_lp_stderr(powers, p, resamples, derive.next_u64());
}

MonteCarloResult mean_result(std::span<const double> values, double order, std::int64_t steps,
                             double horizon, std::string label) {
  const stats::SampleSummary s = stats::summarize(values);
  MonteCarloResult r;
  r.estimate = s.mean;
  r.std_error = s.stddev / std::sqrt(static_cast<double>(s.count));
  r.replicas = s.count;
  r.moment_order = order;
  r.ci_lower = r.estimate - kZ95 * r.std_error;
  r.ci_upper = r.estimate + kZ95 * r.std_error;
  r.steps = steps;
  r.horizon = horizon;
  r.label = std::move(label);
  return r;
}

double distance_pow(const Vec& a, const Vec& b, int d, double p) {
  Vec diff{};
  for (int i = 0; i < d; ++i) diff[i] = a[i] - b[i];
  const double dist = norm(diff, d);
  return p == 2.0 ? dist * dist : std::pow(dist, p);
}

/// Rows of `width` doubles per replica, reduced block by block in replica
/// order into `column_sums`. Keeps memory bounded for long per-replica rows.
template <class Compute>
void blocked_column_sums(std::int64_t replicas, std::size_t width, const Execution& exec,
                         Compute&& compute, std::vector<double>& column_sums) {
  constexpr std::int64_t kBlock = 512;
  column_sums.assign(width, 0.0);
  std::vector<double> rows;
  for (std::int64_t begin = 0; begin < replicas; begin += kBlock) {
    const std::int64_t count = std::min(kBlock, replicas - begin);
    rows.assign(static_cast<std::size_t>(count) * width, 0.0);
    for_each_replica(count, exec, [&](std::int64_t local) {
      compute(begin + local, std::span<double>(rows.data() + static_cast<std::size_t>(local) * width, width));
    });
    for (std::int64_t r = 0; r < count; ++r)
      for (std::size_t c = 0; c < width; ++c) column_sums[c] += rows[static_cast<std::size_t>(r) * width + c];
  }
}

}  // namespace

MonteCarloResult strong_error(const ProblemSpec& problem, std::int64_t coarse_n, std::int64_t fine_n,
                              double p, std::int64_t replicas, std::uint64_t seed,
                              const Execution& exec) {
  check_replicas(replicas);
  check_order(p);
  if (coarse_n < 1 || fine_n % coarse_n != 0) throw InvalidArgument("coarse_n must divide fine_n");
  const int d = problem.dimension;
  std::vector<double> powers(static_cast<std::size_t>(replicas));
  for_each_replica(replicas, exec, [&](std::int64_t i) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
    const auto [coarse, fine] = em_terminal_pair(problem, coarse_n, fine_n, rng);
    powers[static_cast<std::size_t>(i)] = distance_pow(fine, coarse, d, p);
  });
  return lp_result(powers, p, coarse_n, problem.horizon, "strong_error");
}

StrongErrorCurve strong_error_curve(const ProblemSpec& problem, std::span<const std::int64_t> n_list,
                                    std::int64_t fine_n, double p, std::int64_t replicas,
                                    std::uint64_t seed, const Execution& exec, int bootstrap_resamples) {
  check_replicas(replicas);
  check_order(p);
  check_levels(n_list, fine_n, "fine_n");
  const int d = problem.dimension;
  const std::size_t levels = n_list.size();
  std::vector<double> powers(levels * static_cast<std::size_t>(replicas));
  const TimeGrid fine_grid(fine_n, problem.horizon);
  for_each_replica(replicas, exec, [&](std::int64_t i) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
    const BrownianPath path = sample_path(rng, fine_grid, d);
    const Vec reference = em_terminal(problem, path, fine_n);
    for (std::size_t j = 0; j < levels; ++j) {
      const Vec coarse = em_terminal(problem, path, n_list[j]);
      powers[j * static_cast<std::size_t>(replicas) + static_cast<std::size_t>(i)] =
          distance_pow(reference, coarse, d, p);
    }
  });
  StrongErrorCurve curve{"strong_error", p, problem.horizon, seed, {}};
  for (std::size_t j = 0; j < levels; ++j) {
    std::span<const double> col(powers.data() + j * static_cast<std::size_t>(replicas),
                                static_cast<std::size_t>(replicas));
    curve.points.push_back({n_list[j], lp_result(col, p, n_list[j], problem.horizon, "strong_error")});
    add_bootstrap(curve.points.back().result, col, p, bootstrap_resamples, seed, j);
  }
  return curve;
}

StrongErrorCurve quadrature_decay(const ProblemSpec& problem, const TestFunctionSpec& fns,
                                  std::span<const std::int64_t> n_list, std::int64_t m_sub, double p,
                                  std::int64_t replicas, std::uint64_t seed, bool driftless,
                                  const Execution& exec, int bootstrap_resamples) {
  check_replicas(replicas);
  check_order(p);
  if (m_sub < 2) throw InvalidArgument("quadrature needs m_sub >= 2");
  if (fns.dimension != problem.dimension) throw InvalidArgument("test function dimension mismatch");
  if (n_list.empty()) throw InvalidArgument("n_list must not be empty");
  const std::int64_t top = n_list.back();
  check_levels(n_list, top, "largest n");
  const int d = problem.dimension;
  const std::size_t levels = n_list.size();
  const TimeGrid fine_grid(top * m_sub, problem.horizon);
  std::vector<double> powers(levels * static_cast<std::size_t>(replicas));
  for_each_replica(replicas, exec, [&](std::int64_t i) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
    const BrownianPath path = sample_path(rng, fine_grid, d);
    for (std::size_t j = 0; j < levels; ++j) {
      const EMPath ep = em_path(problem, path, n_list[j], m_sub, driftless);
      const double value = quadrature_functional(ep, fns, problem.horizon);
      powers[j * static_cast<std::size_t>(replicas) + static_cast<std::size_t>(i)] =
          std::pow(std::fabs(value), p);
    }
  });
  StrongErrorCurve curve{"quadrature", p, problem.horizon, seed, {}};
  for (std::size_t j = 0; j < levels; ++j) {
    std::span<const double> col(powers.data() + j * static_cast<std::size_t>(replicas),
                                static_cast<std::size_t>(replicas));
    curve.points.push_back({n_list[j], lp_result(col, p, n_list[j], problem.horizon, "quadrature")});
    add_bootstrap(curve.points.back().result, col, p, bootstrap_resamples, seed, j);
  }
  return curve;
}

namespace {

struct MomentPass {
  std::vector<MonteCarloResult> pair_moments;
  MonteCarloResult sup;
  std::int64_t sup_node = 0;
};

MomentPass moment_pass(const ProblemSpec& problem, std::int64_t n, double p,
                       std::span<const std::pair<std::int64_t, std::int64_t>> pairs,
                       std::int64_t replicas, std::uint64_t seed, const Execution& exec) {
  check_replicas(replicas);
  check_order(p);
  if (n < 1) throw InvalidArgument("n must be >= 1");
  for (const auto& [s, t] : pairs)
    if (s < 0 || t > n || s >= t) throw InvalidArgument("node pairs need 0 <= s < t <= n");
  const int d = problem.dimension;
  const TimeGrid grid(n, problem.horizon);
  const std::size_t nodes = static_cast<std::size_t>(n + 1);
  // Row layout: |X_{t_k}|^p, (|X_{t_k}|^p)^2 for each node, then pair values and their squares.
  const std::size_t width = 2 * nodes + 2 * pairs.size();
  std::vector<double> sums;
  blocked_column_sums(replicas, width, exec, [&](std::int64_t i, std::span<double> row) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
    const BrownianPath path = sample_path(rng, grid, d);
    const EMPath ep = em_path(problem, path, n, 1);
    for (std::size_t k = 0; k < nodes; ++k) {
      const double v = distance_pow(ep.value(static_cast<std::int64_t>(k)), Vec{}, d, p);
      row[2 * k] = v;
      row[2 * k + 1] = v * v;
    }
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const double v = distance_pow(ep.value(pairs[j].second), ep.value(pairs[j].first), d, p);
      row[2 * nodes + 2 * j] = v;
      row[2 * nodes + 2 * j + 1] = v * v;
    }
  }, sums);

  const double count = static_cast<double>(replicas);
  auto from_sums = [&](double sum, double sum_sq, std::string label) {
    MonteCarloResult r;
    r.estimate = sum / count;
    const double var = std::max(0.0, (sum_sq - count * r.estimate * r.estimate) / (count - 1.0));
    r.std_error = std::sqrt(var / count);
    r.replicas = replicas;
    r.moment_order = p;
    r.ci_lower = r.estimate - kZ95 * r.std_error;
    r.ci_upper = r.estimate + kZ95 * r.std_error;
    r.steps = n;
    r.horizon = problem.horizon;
    r.label = std::move(label);
    return r;
  };

  MomentPass out;
  double best = -1.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    if (sums[2 * k] > best) {
      best = sums[2 * k];
      out.sup_node = static_cast<std::int64_t>(k);
      out.sup = from_sums(sums[2 * k], sums[2 * k + 1], "sup_moment");
    }
  }
  for (std::size_t j = 0; j < pairs.size(); ++j)
    out.pair_moments.push_back(
        from_sums(sums[2 * nodes + 2 * j], sums[2 * nodes + 2 * j + 1], "increment_moment"));
  return out;
}

}  // namespace

MomentScaling moment_scaling(const ProblemSpec& problem, std::int64_t n, double p,
                             std::span<const std::pair<std::int64_t, std::int64_t>> node_pairs,
                             std::int64_t replicas, std::uint64_t seed, const Execution& exec) {
  if (node_pairs.size() < 3) throw InvalidArgument("moment scaling needs at least 3 node pairs");
  MomentPass pass = moment_pass(problem, n, p, node_pairs, replicas, seed, exec);
  const TimeGrid grid(n, problem.horizon);
  MomentScaling out;
  out.moment_order = p;
  std::vector<double> lags;
  for (std::size_t j = 0; j < node_pairs.size(); ++j) {
    MomentPoint pt;
    pt.start = node_pairs[j].first;
    pt.end = node_pairs[j].second;
    pt.lag = grid.node(pt.end) - grid.node(pt.start);
    pt.moment = pass.pair_moments[j];
    lags.push_back(pt.lag);
    out.points.push_back(std::move(pt));
  }
  out.fit = fit_power_law(lags, pass.pair_moments);
  if (out.fit.status == FitStatus::exact_scheme)
    throw InvalidArgument("moment scaling: all increment moments are zero");
  out.sup_moment = pass.sup;
  out.sup_node = pass.sup_node;
  return out;
}

std::pair<MonteCarloResult, std::int64_t> sup_moment(const ProblemSpec& problem, std::int64_t n,
                                                     double p, std::int64_t replicas,
                                                     std::uint64_t seed, const Execution& exec) {
  MomentPass pass = moment_pass(problem, n, p, {}, replicas, seed, exec);
  return {pass.sup, pass.sup_node};
}

MonteCarloResult crude_quadrature_bound(const ProblemSpec& problem, const TestFunctionSpec& fns,
                                        std::int64_t n, double s, double t, double p,
                                        std::int64_t replicas, std::uint64_t seed,
                                        std::int64_t m_sub, const Execution& exec) {
  check_replicas(replicas);
  check_order(p);
  if (m_sub < 1) throw InvalidArgument("m_sub must be >= 1");
  if (!(s <= t)) throw InvalidArgument("crude quadrature needs s <= t");
  const TimeGrid coarse(n, problem.horizon);
  coarse.node_index(s);
  coarse.node_index(t);
  const int d = problem.dimension;
  const TimeGrid fine(n * m_sub, problem.horizon);
  std::vector<double> powers(static_cast<std::size_t>(replicas));
  for_each_replica(replicas, exec, [&](std::int64_t i) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
    const BrownianPath path = sample_path(rng, fine, d);
    const EMPath ep = em_path(problem, path, n, m_sub);
    powers[static_cast<std::size_t>(i)] = std::pow(std::fabs(quadrature_functional(ep, fns, s, t)), p);
  });
  return lp_result(powers, p, n, problem.horizon, "crude_quadrature");
}

MonteCarloResult tail_probability(const ProblemSpec& problem, std::int64_t n, double r,
                                  std::int64_t replicas, std::uint64_t seed, double level,
                                  const Execution& exec) {
  check_replicas(replicas, 1);
  const TimeGrid grid(n, problem.horizon);
  if (!(r > 0.0 && r <= problem.horizon)) throw InvalidArgument("tail time r must lie in (0, T]");
  const std::int64_t k = grid.kappa_index(r);
  const double elapsed = r - grid.node(k);
  const int d = problem.dimension;
  std::vector<char> hit(static_cast<std::size_t>(replicas), 0);
  if (elapsed > 0.0) {
    // Y on the first k steps, then one partial step of length r - t_k.
    const std::optional<ProblemSpec> prefix =
        k > 0 ? std::optional<ProblemSpec>(std::in_place, problem.x0, grid.node(k), problem.drift,
                                           problem.diffusion)
              : std::nullopt;
    for_each_replica(replicas, exec, [&](std::int64_t i) {
      RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
      Vec y = problem.x0;
      if (prefix) {
        const BrownianPath path = sample_path(rng, TimeGrid(k, prefix->horizon), d);
        y = em_terminal(*prefix, path, k, true);
      }
      Vec db{};
      for (int c = 0; c < d; ++c) db[c] = std::sqrt(elapsed) * rng.normal();
      const Vec jump = apply(problem.diffusion(y), db, d);
      hit[static_cast<std::size_t>(i)] = norm(jump, d) > 1.0 ? 1 : 0;
    });
  }
  std::int64_t count = 0;
  for (const char h : hit) count += h;
  MonteCarloResult res;
  res.replicas = replicas;
  res.estimate = static_cast<double>(count) / static_cast<double>(replicas);
  res.std_error = std::sqrt(res.estimate * (1.0 - res.estimate) / static_cast<double>(replicas));
  std::tie(res.ci_lower, res.ci_upper) = stats::clopper_pearson(count, replicas, level);
  res.moment_order = 1.0;
  res.steps = n;
  res.horizon = problem.horizon;
  res.label = "tail_probability";
  return res;
}

GirsanovTable girsanov_moments(const ProblemSpec& problem, double q, std::span<const double> p_list,
                               std::span<const std::int64_t> n_list, std::int64_t replicas,
                               std::uint64_t seed, double log_weight_cap, const Execution& exec) {
  check_replicas(replicas, 1000);
  if (p_list.empty()) throw InvalidArgument("p_list must not be empty");
  for (const double p : p_list)
    if (!(p > 0.0)) throw InvalidArgument("Girsanov moment orders must be positive");
  if (n_list.empty()) throw InvalidArgument("n_list must not be empty");
  const std::int64_t top = n_list.back();
  check_levels(n_list, top, "largest n");
  const int d = problem.dimension;
  const std::size_t levels = n_list.size();
  const TimeGrid grid(top, problem.horizon);
  std::vector<double> logw(levels * static_cast<std::size_t>(replicas));
  for_each_replica(replicas, exec, [&](std::int64_t i) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
    const BrownianPath path = sample_path(rng, grid, d);
    for (std::size_t j = 0; j < levels; ++j) {
      const EMPath y = em_path(problem, path, n_list[j], 1, true);
      logw[j * static_cast<std::size_t>(replicas) + static_cast<std::size_t>(i)] =
          girsanov_weight(y, problem.drift, problem.diffusion, q).log_weight;
    }
  });

  GirsanovTable table;
  table.max_log_weight = -std::numeric_limits<double>::infinity();
  std::vector<double> values(static_cast<std::size_t>(replicas));
  for (const double p : p_list)
    for (std::size_t j = 0; j < levels; ++j) {
      for (std::int64_t i = 0; i < replicas; ++i) {
        const double lw = p * logw[j * static_cast<std::size_t>(replicas) + static_cast<std::size_t>(i)];
        table.max_log_weight = std::max(table.max_log_weight, lw);
        if (lw > log_weight_cap) ++table.capped;
        values[static_cast<std::size_t>(i)] = std::exp(lw);
      }
      table.rows.push_back({q, p, n_list[j], mean_result(values, p, n_list[j], problem.horizon, "girsanov_moment")});
    }
  return table;
}

std::pair<MonteCarloResult, MonteCarloResult> girsanov_reweighting(
    const ProblemSpec& problem, const std::function<double(const Vec&)>& phi, std::int64_t n,
    std::int64_t replicas, std::uint64_t seed, const Execution& exec) {
  check_replicas(replicas);
  const int d = problem.dimension;
  const TimeGrid grid(n, problem.horizon);
  std::vector<double> direct(static_cast<std::size_t>(replicas));
  std::vector<double> weighted(static_cast<std::size_t>(replicas));
  for_each_replica(replicas, exec, [&](std::int64_t i) {
    RngStream rx = derive_stream(seed, 2 * static_cast<std::uint64_t>(i));
    const BrownianPath px = sample_path(rx, grid, d);
    direct[static_cast<std::size_t>(i)] = phi(em_terminal(problem, px, n));
    RngStream ry = derive_stream(seed, 2 * static_cast<std::uint64_t>(i) + 1);
    const BrownianPath py = sample_path(ry, grid, d);
    const EMPath y = em_path(problem, py, n, 1, true);
    const GirsanovWeight w = girsanov_weight(y, problem.drift, problem.diffusion, 1.0);
    weighted[static_cast<std::size_t>(i)] = phi(y.terminal()) * w.weight();
  });
  return {mean_result(direct, 1.0, n, problem.horizon, "direct"),
          mean_result(weighted, 1.0, n, problem.horizon, "reweighted")};
}

RateFit fit_power_law(std::span<const double> abscissae, std::span<const MonteCarloResult> values) {
  if (abscissae.size() != values.size()) throw InvalidArgument("fit inputs differ in length");
  RateFit fit;
  if (!values.empty() &&
      std::all_of(values.begin(), values.end(), [](const MonteCarloResult& r) { return r.estimate == 0.0; })) {
    fit.status = FitStatus::exact_scheme;
    fit.slope = fit.intercept = fit.slope_stderr = 0.0;
    fit.slope_ci_lower = fit.slope_ci_upper = 0.0;
    fit.r_squared = 1.0;
    fit.points_used = 0;
    for (const double x : abscissae) fit.excluded.push_back(x);
    return fit;
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const MonteCarloResult& r = values[i];
    if (!(r.estimate > 0.0) || r.estimate < 3.0 * r.std_error || !(abscissae[i] > 0.0)) {
      fit.excluded.push_back(abscissae[i]);
      continue;
    }
    xs.push_back(std::log(abscissae[i]));
    ys.push_back(std::log(r.estimate));
  }
  if (xs.size() < 3)
    throw InvalidArgument("fewer than 3 usable points for a rate fit (" + std::to_string(xs.size()) +
                          " usable)");
  const stats::LinearFit lf = stats::ordinary_least_squares(xs, ys);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.slope_stderr = lf.slope_stderr;
  fit.r_squared = lf.r_squared;
  fit.points_used = lf.points;
  const double t = stats::student_t_quantile(0.975, static_cast<double>(lf.points - 2));
  fit.slope_ci_lower = lf.slope - t * lf.slope_stderr;
  fit.slope_ci_upper = lf.slope + t * lf.slope_stderr;
  return fit;
}

RateFit fit_rate(const StrongErrorCurve& curve) {
  std::vector<double> ns;
  std::vector<MonteCarloResult> values;
  for (const CurvePoint& pt : curve.points) {
    if (!ns.empty() && static_cast<double>(pt.n) <= ns.back())
      throw InvalidArgument("curve n values must be strictly increasing");
    ns.push_back(static_cast<double>(pt.n));
    values.push_back(pt.result);
  }
  RateFit fit = fit_power_law(ns, values);
  if (fit.status == FitStatus::ok) {
    fit.slope = -fit.slope;
    std::swap(fit.slope_ci_lower, fit.slope_ci_upper);
    fit.slope_ci_lower = -fit.slope_ci_lower;
    fit.slope_ci_upper = -fit.slope_ci_upper;
  }
  return fit;
}

}  // namespace emrates
