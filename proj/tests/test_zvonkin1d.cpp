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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "emrates/brownian.hpp"
#include "emrates/coefficients.hpp"
#include "emrates/errors.hpp"
#include "emrates/estimators.hpp"
#include "emrates/rng.hpp"
#include "emrates/scheme.hpp"
#include "emrates/zvonkin1d.hpp"

using namespace emrates;
using namespace emrates::zvonkin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinULP;

namespace {

const ScalarFunction kOne = [](double) { return 1.0; };

DriftSpec constant_drift(double c) {
  return DriftSpec::custom("constant", 1, [c](const Vec&) { return Vec{c}; }, 0.5, 0.0);
}

DriftSpec sqrt_drift() { return builtin_drift("power", std::vector<double>{0.5}, 1); }

DiffusionSpec identity() { return builtin_diffusion("identity", {}, 1); }

double max_error(const ResolventSolution& s, const ScalarFunction& exact, double window) {
  double err = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i)
    if (std::fabs(s.x[i]) <= window) err = std::max(err, std::fabs(s.u[i] - exact(s.x[i])));
  return err;
}

}  // namespace

TEST_CASE("constant drift gives a constant solution", "[zvonkin]") {
  for (const double lam : {0.5, 1.0, 10.0}) {
    const ResolventSolution s = solve_resolvent(constant_drift(0.7), identity(), lam, 8.0, 1e-3);
    for (const double v : s.u) CHECK_THAT(v, WithinULP(0.7 / lam, 2));
    CHECK(s.sup_du < 1e-12);
    CHECK(s.boundary_condition == "drift_over_lambda");
  }
  const ResolventSolution a = solve_resolvent(constant_drift(0.7), identity(), 1.0, 8.0, 1e-3);
  const ResolventSolution b = solve_resolvent(constant_drift(0.7), identity(), 10.0, 8.0, 1e-3);
  CHECK_THAT(b.value(0.3) * 10.0, WithinRel(a.value(0.3), 1e-12));
}

TEST_CASE("manufactured smooth solution", "[zvonkin]") {
  const ScalarFunction advection = [](double x) { return std::sin(x); };
  const double lam = 2.0, radius = 8.0;
  const ScalarFunction rhs = [lam](double x) { return (lam + 0.5) * std::sin(x) - std::sin(x) * std::cos(x); };
  const ScalarFunction exact = [](double x) { return std::sin(x); };
  SolverOptions opts;
  opts.boundary_values = std::make_pair(std::sin(-radius), std::sin(radius));

  const ResolventSolution fine = solve_elliptic(advection, rhs, kOne, lam, radius, 1e-3, opts);
  CHECK(fine.boundary_condition == "prescribed");
  CHECK(max_error(fine, exact, radius) < 1e-6);
  CHECK_THAT(fine.derivative(0.4), WithinAbs(std::cos(0.4), 1e-5));

  const double coarse = max_error(solve_elliptic(advection, rhs, kOne, lam, radius, 1e-2, opts), exact, radius);
  const double half = max_error(solve_elliptic(advection, rhs, kOne, lam, radius, 5e-3, opts), exact, radius);
  CHECK(coarse / half >= 3.5);
}

TEST_CASE("constant advection closed form", "[zvonkin]") {
  // lambda u - u''/2 - c u' = x is solved by u = x / lambda + c / lambda^2.
  const double c = 0.8, lam = 3.0, radius = 10.0;
  const ScalarFunction exact = [=](double x) { return x / lam + c / (lam * lam); };
  SolverOptions opts;
  opts.boundary_values = std::make_pair(exact(-radius), exact(radius));
  const ResolventSolution s = solve_elliptic([c](double) { return c; }, [](double x) { return x; }, kOne, lam,
                                             radius, 1e-3, opts);
  CHECK(max_error(s, exact, radius) < 1e-10);
  CHECK_THAT(s.sup_du, WithinAbs(1.0 / lam, 1e-8));
  CHECK(s.sup_d2u < 1e-6);
}

TEST_CASE("solver is linear in the right-hand side", "[zvonkin]") {
  const ScalarFunction advection = [](double x) { return std::tanh(x); };
  const ScalarFunction f1 = [](double x) { return std::cos(x); };
  const ScalarFunction f2 = [](double x) { return std::sqrt(std::fabs(x)); };
  const ScalarFunction sum = [&](double x) { return f1(x) + f2(x); };
  const ResolventSolution a = solve_elliptic(advection, f1, kOne, 1.5, 8.0, 1e-3);
  const ResolventSolution b = solve_elliptic(advection, f2, kOne, 1.5, 8.0, 1e-3);
  const ResolventSolution c = solve_elliptic(advection, sum, kOne, 1.5, 8.0, 1e-3);
  REQUIRE(a.x.size() == c.x.size());
  for (std::size_t i = 0; i < c.x.size(); ++i) CHECK_THAT(c.u[i], WithinAbs(a.u[i] + b.u[i], 1e-12));

  const ResolventSolution d = solve_elliptic(advection, [&](double x) { return 2.0 * f2(x); }, kOne, 1.5, 8.0, 1e-3);
  for (std::size_t i = 0; i < d.x.size(); ++i) CHECK(d.u[i] == 2.0 * b.u[i]);
  CHECK(d.sup_du == 2.0 * b.sup_du);
  CHECK(d.sup_d2u == 2.0 * b.sup_d2u);
  CHECK(d.weighted_sup_u == 2.0 * b.weighted_sup_u);
}

TEST_CASE("mesh is refined on the unit interval", "[zvonkin]") {
  const ResolventSolution s = solve_resolvent(sqrt_drift(), identity(), 1.0, 8.0, 1e-2);
  CHECK(s.x.front() == -8.0);
  CHECK(s.x.back() == 8.0);
  for (std::size_t i = 1; i < s.x.size(); ++i) {
    const double mid = 0.5 * (s.x[i] + s.x[i - 1]);
    const double expected = std::fabs(mid) < 1.0 ? 5e-3 : 1e-2;
    CHECK_THAT(s.x[i] - s.x[i - 1], WithinRel(expected, 1e-6));
  }
  CHECK(s.u.size() == s.x.size());
  CHECK(s.du.size() == s.x.size());
  CHECK(s.d2u.size() == s.x.size());
  CHECK_THAT(s.value(s.x[37]), WithinAbs(s.u[37], 1e-15));
  CHECK_THROWS_AS(s.value(8.5), InvalidArgument);
  CHECK_THROWS_AS(s.derivative(-9.0), InvalidArgument);
}

TEST_CASE("derivative norms decay in lambda", "[zvonkin]") {
  const std::vector<double> lambdas{1.0, 10.0, 100.0, 1000.0};
  const std::vector<NormSample> sweep = norm_decay_sweep(sqrt_drift(), identity(), lambdas, 8.0, 1e-3);
  REQUIRE(sweep.size() == 4);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    CHECK(sweep[i].sup_du < sweep[i - 1].sup_du);
    CHECK(sweep[i].weighted_sup_u < sweep[i - 1].weighted_sup_u);
  }
  CHECK(sweep.back().sup_du < 0.5 * sweep.front().sup_du);
  const auto lambda0 = empirical_lambda0(sweep);
  REQUIRE(lambda0.has_value());
  CHECK(*lambda0 == 1.0);

  std::vector<NormSample> bumpy = sweep;
  bumpy[1].sup_du = 10.0 * bumpy[0].sup_du;
  CHECK(empirical_lambda0(bumpy) == 10.0);

  const std::vector<double> narrow{1.0, 2.0, 4.0, 8.0};
  CHECK_THROWS_AS(norm_decay_sweep(sqrt_drift(), identity(), narrow, 8.0, 1e-3), InvalidArgument);
  const std::vector<double> short_list{1.0, 10.0, 1000.0};
  CHECK_THROWS_AS(norm_decay_sweep(sqrt_drift(), identity(), short_list, 8.0, 1e-3), InvalidArgument);
}

TEST_CASE("truncation radius barely moves the solution", "[zvonkin]") {
  const ResolventSolution a = solve_resolvent(sqrt_drift(), identity(), 10.0, 8.0, 1e-3);
  const ResolventSolution b = solve_resolvent(sqrt_drift(), identity(), 10.0, 16.0, 1e-3);
  for (const double x : {-2.0, -0.5, 0.0, 0.25, 1.0, 3.0}) {
    CHECK(std::fabs(a.value(x) - b.value(x)) < 0.01 * std::max(1e-3, std::fabs(b.value(x))));
    CHECK(std::fabs(a.derivative(x) - b.derivative(x)) < 0.01 * std::max(1e-3, std::fabs(b.derivative(x))));
  }
  CHECK(a.max_residual < 1e-6);
}

TEST_CASE("solver preconditions", "[zvonkin]") {
  const ScalarFunction zero = [](double) { return 0.0; };
  CHECK_THROWS_AS(solve_elliptic(zero, kOne, kOne, 0.0, 8.0, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(solve_elliptic(zero, kOne, kOne, -1.0, 8.0, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(solve_elliptic(zero, kOne, kOne, 1.0, 7.0, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(solve_elliptic(zero, kOne, kOne, 1.0, 8.0, 2e-2), InvalidArgument);
  CHECK_THROWS_AS(solve_elliptic(zero, kOne, kOne, 1.0, 8.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_elliptic(zero, kOne, [](double) { return 0.0; }, 1.0, 8.0, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(solve_resolvent(builtin_drift("zero", {}, 2), builtin_diffusion("identity", {}, 2), 1.0, 8.0, 1e-3),
                  InvalidArgument);
}

TEST_CASE("Ito-Tanaka residual", "[zvonkin]") {
  const TimeGrid grid(256, 1.0);

  SECTION("zero drift gives an exactly vanishing residual") {
    const ProblemSpec prob(Vec{0.5}, 1.0, builtin_drift("zero", {}, 1), identity());
    const ResolventSolution s = solve_resolvent(prob.drift, prob.diffusion, 1.0, 8.0, 1e-3);
    for (const double v : s.u) CHECK(v == 0.0);
    RngStream rng(21, 0);
    const EMPath ep = em_path(prob, sample_path(rng, grid, 1), 256, 1);
    const ItoTanakaResidual r = ito_tanaka_residual(s, ep, prob.drift, prob.diffusion);
    CHECK_FALSE(r.exited);
    CHECK(r.value == 0.0);
  }

  SECTION("constant drift gives a vanishing residual") {
    const ProblemSpec prob(Vec{0.5}, 1.0, constant_drift(0.6), identity());
    const ResolventSolution s = solve_resolvent(prob.drift, prob.diffusion, 1.0, 8.0, 1e-3);
    RngStream rng(22, 0);
    const EMPath ep = em_path(prob, sample_path(rng, grid, 1), 256, 1);
    const ItoTanakaResidual r = ito_tanaka_residual(s, ep, prob.drift, prob.diffusion);
    CHECK(std::fabs(r.value) < 1e-10);
  }

  SECTION("paths leaving the domain are flagged") {
    const ProblemSpec prob(Vec{6.9}, 1.0, constant_drift(5.0), identity());
    const ResolventSolution s = solve_resolvent(prob.drift, prob.diffusion, 1.0, 8.0, 1e-3);
    RngStream rng(23, 0);
    const EMPath ep = em_path(prob, sample_path(rng, grid, 1), 256, 1);
    CHECK(ito_tanaka_residual(s, ep, prob.drift, prob.diffusion).exited);
  }

  SECTION("residual shrinks under refinement") {
    const ProblemSpec prob(Vec{0.0}, 1.0, sqrt_drift(), identity());
    const ResolventSolution s = solve_resolvent(prob.drift, prob.diffusion, 1.0, 8.0, 1e-3);
    const std::vector<std::int64_t> ns{16, 64, 256};
    const ResidualCurve c = ito_tanaka_curve(prob, s, ns, 400, 24);
    CHECK(c.exited == 0);
    for (std::size_t i = 1; i < ns.size(); ++i)
      CHECK(c.curve.points[i].result.estimate < c.curve.points[i - 1].result.estimate);
    const ResidualCurve again = ito_tanaka_curve(prob, s, ns, 400, 24, Execution{3});
    for (std::size_t i = 0; i < ns.size(); ++i)
      CHECK(again.curve.points[i].result.estimate == c.curve.points[i].result.estimate);
  }
}

TEST_CASE("solution export", "[zvonkin]") {
  const ResolventSolution s = solve_resolvent(sqrt_drift(), identity(), 1.0, 8.0, 1e-2);
  std::ostringstream out;
  write_solution_csv(s, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,u,du,d2u");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(rows == s.x.size());
}
