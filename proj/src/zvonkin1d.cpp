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

#include "emrates/zvonkin1d.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "emrates/errors.hpp"
#include "emrates/stats.hpp"

namespace emrates::zvonkin {
namespace {

std::vector<double> build_mesh(double radius, double h) {
  const auto outer = static_cast<std::int64_t>(std::ceil((radius - 1.0) / h - 1e-9));
  const auto inner = static_cast<std::int64_t>(std::ceil(2.0 / (0.5 * h) - 1e-9));
  const double ho = (radius - 1.0) / static_cast<double>(outer);
  const double hi = 2.0 / static_cast<double>(inner);
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(2 * outer + inner + 1));
  for (std::int64_t i = 0; i < outer; ++i) x.push_back(-radius + static_cast<double>(i) * ho);
  for (std::int64_t i = 0; i < inner; ++i) x.push_back(-1.0 + static_cast<double>(i) * hi);
  for (std::int64_t i = 0; i < outer; ++i) x.push_back(1.0 + static_cast<double>(i) * ho);
  x.push_back(radius);
  return x;
}

/// Thomas algorithm; overwrites diag and rhs. lower[0] and upper[n-1] unused.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) throw SimulationError("singular tridiagonal system");
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) throw SimulationError("singular tridiagonal system");
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

double hermite(double x0, double x1, double f0, double f1, double d0, double d1, double at) {
  const double h = x1 - x0;
  const double t = (at - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 +
         (t3 - t2) * h * d1;
}

std::size_t locate(const std::vector<double>& x, double at) {
  if (!(at >= x.front() && at <= x.back()))
    throw InvalidArgument("interpolation point " + std::to_string(at) + " outside the mesh");
  auto it = std::upper_bound(x.begin(), x.end(), at);
  std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  return std::min(i, x.size() - 2);
}

double drift_1d(const DriftSpec& b, double x) { return b(Vec{x, 0.0, 0.0})[0]; }
double sigma_1d(const DiffusionSpec& s, double x) { return at(s(Vec{x, 0.0, 0.0}), 0, 0); }

}  // namespace

double ResolventSolution::value(double at) const {
  const std::size_t i = locate(x, at);
  return hermite(x[i], x[i + 1], u[i], u[i + 1], du[i], du[i + 1], at);
}

double ResolventSolution::derivative(double at) const {
  const std::size_t i = locate(x, at);
  return hermite(x[i], x[i + 1], du[i], du[i + 1], d2u[i], d2u[i + 1], at);
}

ResolventSolution solve_elliptic(const ScalarFunction& advection, const ScalarFunction& rhs,
                                 const ScalarFunction& diffusion_a, double lambda, double radius,
                                 double h, const SolverOptions& options) {
  if (!(lambda > 0.0)) throw InvalidArgument("resolvent parameter lambda must be > 0");
  if (!(radius >= 8.0)) throw InvalidArgument("domain radius R must be >= 8");
  if (!(h > 0.0 && h <= 1e-2)) throw InvalidArgument("mesh width h must lie in (0, 1e-2]");

  ResolventSolution sol;
  sol.lambda = lambda;
  sol.radius = radius;
  sol.mesh_width = h;
  sol.holder_exponent = options.holder_exponent;
  sol.x = build_mesh(radius, h);
  const std::vector<double>& x = sol.x;
  const std::size_t count = x.size();

  std::vector<double> a(count), b(count), f(count);
  double f_scale = 1.0;
  for (std::size_t i = 0; i < count; ++i) {
    a[i] = diffusion_a(x[i]);
    b[i] = advection(x[i]);
    f[i] = rhs(x[i]);
    if (!(a[i] > 0.0) || !std::isfinite(a[i]) || !std::isfinite(b[i]) || !std::isfinite(f[i]))
      throw InvalidArgument("coefficients must be finite with a > 0 on the mesh");
    f_scale = std::max(f_scale, std::fabs(f[i]));
  }

  double left, right;
  if (options.boundary_values) {
    std::tie(left, right) = *options.boundary_values;
    sol.boundary_condition = "prescribed";
  } else {
    left = f.front() / lambda;
    right = f.back() / lambda;
    sol.boundary_condition = "rhs_over_lambda";
  }

  // Solve for the correction w = u - f / lambda; constants are then reproduced
  // without elimination round-off.
  std::vector<double> base(count);
  for (std::size_t i = 0; i < count; ++i) base[i] = f[i] / lambda;

  // Interior rows i = 1..count-2 with non-uniform three-point stencils.
  const std::size_t m = count - 2;
  std::vector<double> lower(m), diag(m), upper(m), vec(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = r + 1;
    const double hm = x[i] - x[i - 1];
    const double hp = x[i + 1] - x[i];
    const double hs = hm + hp;
    lower[r] = -a[i] / (hm * hs) + b[i] * hp / (hm * hs);
    upper[r] = -a[i] / (hp * hs) - b[i] * hm / (hp * hs);
    diag[r] = lambda + a[i] / (hm * hp) - b[i] * (hp - hm) / (hm * hp);
    const double dm = base[i] - base[i - 1];
    const double dp = base[i + 1] - base[i];
    const double second = 2.0 * (dp / hp - dm / hm) / hs;
    const double first = (hm * hm * dp + hp * hp * dm) / (hm * hp * hs);
    vec[r] = f[i] - (lambda * base[i] - 0.5 * a[i] * second - b[i] * first);
  }
  vec.front() -= lower.front() * (left - base.front());
  vec.back() -= upper.back() * (right - base.back());
  solve_tridiagonal(lower, diag, upper, vec);

  sol.u.resize(count);
  sol.u.front() = left;
  sol.u.back() = right;
  for (std::size_t r = 0; r < m; ++r) sol.u[r + 1] = base[r + 1] + vec[r];

  const std::vector<double>& u = sol.u;
  sol.du.resize(count);
  sol.d2u.resize(count);
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double hm = x[i] - x[i - 1];
    const double hp = x[i + 1] - x[i];
    const double hs = hm + hp;
    sol.du[i] = (hm * hm * (u[i + 1] - u[i]) + hp * hp * (u[i] - u[i - 1])) / (hm * hp * hs);
    sol.d2u[i] = 2.0 * ((u[i + 1] - u[i]) / hp - (u[i] - u[i - 1]) / hm) / hs;
  }
  // One-sided second-order differences at the ends (uniform spacing there).
  {
    const double ho = x[1] - x[0];
    sol.du[0] = (4.0 * (u[1] - u[0]) - (u[2] - u[0])) / (2.0 * ho);
    sol.du[count - 1] = (4.0 * (u[count - 1] - u[count - 2]) - (u[count - 1] - u[count - 3])) / (2.0 * ho);
    sol.d2u[0] = 2.0 * sol.d2u[1] - sol.d2u[2];
    sol.d2u[count - 1] = 2.0 * sol.d2u[count - 2] - sol.d2u[count - 3];
  }

  for (std::size_t i = 0; i < count; ++i) {
    sol.weighted_sup_u = std::max(sol.weighted_sup_u, std::fabs(u[i]) / (1.0 + std::fabs(x[i])));
    sol.sup_du = std::max(sol.sup_du, std::fabs(sol.du[i]));
    sol.sup_d2u = std::max(sol.sup_d2u, std::fabs(sol.d2u[i]));
    if (i > 0 && i + 1 < count) {
      const double res = lambda * u[i] - 0.5 * a[i] * sol.d2u[i] - b[i] * sol.du[i] - f[i];
      sol.max_residual = std::max(sol.max_residual, std::fabs(res));
    }
  }
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t off = 1; i + off < count; off *= 2) {
      const double sep = x[i + off] - x[i];
      if (sep > 1.0) break;
      sol.holder_d2u = std::max(sol.holder_d2u, std::fabs(sol.d2u[i + off] - sol.d2u[i]) /
                                                    std::pow(sep, options.holder_exponent));
    }

  if (!(sol.max_residual <= options.relative_tolerance * f_scale)) {
    std::ostringstream os;
    os << "resolvent residual " << sol.max_residual << " exceeds tolerance "
       << options.relative_tolerance * f_scale;
    throw SimulationError(os.str());
  }
  return sol;
}

ResolventSolution solve_resolvent(const DriftSpec& drift, const DiffusionSpec& diffusion,
                                  double lambda, double radius, double h) {
  if (drift.dimension != 1 || diffusion.dimension != 1)
    throw InvalidArgument("the resolvent solver is one-dimensional");
  const double ell = diffusion.ellipticity_lambda;
  const ScalarFunction b = [&drift](double x) { return drift_1d(drift, x); };
  const ScalarFunction a = [&diffusion, ell](double x) {
    const double s = sigma_1d(diffusion, x);
    const double v = s * s;
    if (v < (1.0 / ell) * (1.0 - 1e-12) || v > ell * (1.0 + 1e-12))
      throw InvalidArgument("a(x) = sigma(x)^2 leaves [1/lambda, lambda] at x = " + std::to_string(x));
    return v;
  };
  SolverOptions opts;
  opts.holder_exponent = 0.5 * drift.holder_exponent;
  ResolventSolution sol = solve_elliptic(b, b, a, lambda, radius, h, opts);
  sol.boundary_condition = "drift_over_lambda";
  return sol;
}

std::vector<NormSample> norm_decay_sweep(const DriftSpec& drift, const DiffusionSpec& diffusion,
                                         std::span<const double> lambdas, double radius, double h) {
  if (lambdas.size() < 4) throw InvalidArgument("norm sweep needs at least 4 lambda values");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1])) throw InvalidArgument("lambda values must be increasing");
  if (!(lambdas.front() > 0.0) || lambdas.back() / lambdas.front() < 1e3 * (1.0 - 1e-12))
    throw InvalidArgument("lambda values must span at least 3 decades");
  std::vector<NormSample> out;
  for (const double lam : lambdas) {
    const ResolventSolution s = solve_resolvent(drift, diffusion, lam, radius, h);
    out.push_back({lam, s.sup_du, s.sup_d2u, s.weighted_sup_u});
  }
  return out;
}

std::optional<double> empirical_lambda0(std::span<const NormSample> sweep) {
  if (sweep.size() < 2) return std::nullopt;
  std::size_t start = sweep.size() - 1;
  while (start > 0 && sweep[start].sup_du < sweep[start - 1].sup_du) --start;
  if (start == sweep.size() - 1) return std::nullopt;
  return sweep[start].lambda;
}

ItoTanakaResidual ito_tanaka_residual(const ResolventSolution& solution, const EMPath& path,
                                      const DriftSpec& drift, const DiffusionSpec& diffusion) {
  if (path.dimension() != 1) throw InvalidArgument("Ito-Tanaka residual is one-dimensional");
  const std::int64_t n = path.eval_grid().steps();
  const double limit = solution.radius - 1.0;
  for (std::int64_t j = 0; j <= n; ++j)
    if (std::fabs(path.value(j)[0]) > limit) return {0.0, true};

  const double dt = path.eval_grid().step();
  double drift_sum = 0.0, u_sum = 0.0, ito_sum = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const double xj = path.value(j)[0];
    drift_sum += drift_1d(drift, xj);
    u_sum += solution.value(xj);
    const double db = path.noise().value(j + 1, 0) - path.noise().value(j, 0);
    ito_sum += solution.derivative(xj) * sigma_1d(diffusion, xj) * db;
  }
  const double x0 = path.value(0)[0];
  const double xt = path.value(n)[0];
  const double transformed =
      solution.value(x0) - solution.value(xt) + solution.lambda * (u_sum * dt) + ito_sum;
  return {drift_sum * dt - transformed, false};
}

ResidualCurve ito_tanaka_curve(const ProblemSpec& problem, const ResolventSolution& solution,
                               std::span<const std::int64_t> n_list, std::int64_t replicas,
                               std::uint64_t seed, const Execution& exec) {
  if (problem.dimension != 1) throw InvalidArgument("Ito-Tanaka residual is one-dimensional");
  if (replicas < 2) throw InvalidArgument("need at least 2 replicas");
  if (n_list.empty()) throw InvalidArgument("n_list must not be empty");
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    if (n_list[j] < 1 || (j > 0 && n_list[j] <= n_list[j - 1]))
      throw InvalidArgument("n_list must be strictly increasing and positive");
    if (n_list.back() % n_list[j] != 0)
      throw InvalidArgument("largest n not a multiple of n=" + std::to_string(n_list[j]));
  }
  const std::size_t levels = n_list.size();
  const TimeGrid grid(n_list.back(), problem.horizon);
  std::vector<double> squares(levels * static_cast<std::size_t>(replicas));
  std::vector<char> exited(static_cast<std::size_t>(replicas), 0);
  for_each_replica(replicas, exec, [&](std::int64_t i) {
    RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(i));
    const BrownianPath path = sample_path(rng, grid, 1);
    for (std::size_t j = 0; j < levels; ++j) {
      const EMPath ep = em_path(problem, path, n_list[j], 1);
      const ItoTanakaResidual r = ito_tanaka_residual(solution, ep, problem.drift, problem.diffusion);
      if (r.exited) {
        exited[static_cast<std::size_t>(i)] = 1;
        return;
      }
      squares[j * static_cast<std::size_t>(replicas) + static_cast<std::size_t>(i)] = r.value * r.value;
    }
  });

  ResidualCurve out;
  out.curve = StrongErrorCurve{"ito_tanaka_residual", 2.0, problem.horizon, seed, {}};
  for (const char e : exited) out.exited += e;
  std::vector<double> kept;
  for (std::size_t j = 0; j < levels; ++j) {
    kept.clear();
    for (std::int64_t i = 0; i < replicas; ++i)
      if (!exited[static_cast<std::size_t>(i)])
        kept.push_back(squares[j * static_cast<std::size_t>(replicas) + static_cast<std::size_t>(i)]);
    if (kept.size() < 2) throw SimulationError("too few replicas stayed inside the domain");
    const auto [estimate, se] = stats::lp_norm_from_powers(kept, 2.0);
    MonteCarloResult r;
    r.estimate = estimate;
    r.std_error = se;
    r.replicas = static_cast<std::int64_t>(kept.size());
    r.moment_order = 2.0;
    r.ci_lower = std::max(0.0, estimate - 1.959963984540054 * se);
    r.ci_upper = estimate + 1.959963984540054 * se;
    r.steps = n_list[j];
    r.horizon = problem.horizon;
    r.label = "ito_tanaka_residual";
    out.curve.points.push_back({n_list[j], r});
  }
  return out;
}

void write_solution_csv(const ResolventSolution& solution, std::ostream& out) {
  out << "x,u,du,d2u\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, end - buf);
    out.put(sep);
  };
  for (std::size_t i = 0; i < solution.x.size(); ++i) {
    put(solution.x[i], ',');
    put(solution.u[i], ',');
    put(solution.du[i], ',');
    put(solution.d2u[i], '\n');
  }
}

}  // namespace emrates::zvonkin
