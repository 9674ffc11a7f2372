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
#include <vector>

#include "emrates/errors.hpp"
#include "emrates/rng.hpp"
#include "emrates/stats.hpp"

using namespace emrates;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("sample summary", "[stats]") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto s = stats::summarize(v);
  CHECK(s.mean == 2.5);
  CHECK_THAT(s.stddev, WithinRel(std::sqrt(5.0 / 3.0), 1e-15));
  CHECK(s.count == 4);
}

TEST_CASE("L^p norm with delta-method error", "[stats]") {
  const std::vector<double> zeros(10, 0.0);
  const auto [e0, s0] = stats::lp_norm_from_powers(zeros, 2.0);
  CHECK(e0 == 0.0);
  CHECK(s0 == 0.0);

  const std::vector<double> constant(10, 4.0);
  const auto [e1, s1] = stats::lp_norm_from_powers(constant, 2.0);
  CHECK(e1 == 2.0);
  CHECK(s1 == 0.0);

  // Mean m, sd s, N values: se = (1/p) m^{1/p - 1} s / sqrt(N).
  const std::vector<double> v{1.0, 3.0, 5.0, 7.0};
  const auto [e, se] = stats::lp_norm_from_powers(v, 2.0);
  CHECK_THAT(e, WithinRel(2.0, 1e-15));
  const double sd = std::sqrt(20.0 / 3.0);
  CHECK_THAT(se, WithinRel(0.5 / 2.0 * sd / 2.0, 1e-14));
}

TEST_CASE("delta-method error shrinks like 1/sqrt(N) and agrees with bootstrap", "[stats]") {
  RngStream rng(1, 0);
  std::vector<double> powers;
  for (int i = 0; i < 20000; ++i) {
    const double z = rng.normal();
    powers.push_back(z * z);
  }
  const std::vector<double> half(powers.begin(), powers.begin() + 10000);
  const auto [e_full, se_full] = stats::lp_norm_from_powers(powers, 2.0);
  const auto [e_half, se_half] = stats::lp_norm_from_powers(half, 2.0);
  CHECK_THAT(se_half / se_full, WithinAbs(std::sqrt(2.0), 0.1));
  const double boot = stats::bootstrap_lp_stderr(half, 2.0, 200, 5);
  CHECK_THAT(boot / se_half, WithinAbs(1.0, 0.2));
  CHECK(stats::bootstrap_lp_stderr(half, 2.0, 200, 5) == boot);
}

TEST_CASE("least squares", "[stats]") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
  const auto f = stats::ordinary_least_squares(x, y);
  CHECK_THAT(f.slope, WithinAbs(2.0, 1e-14));
  CHECK_THAT(f.intercept, WithinAbs(1.0, 1e-14));
  CHECK_THAT(f.slope_stderr, WithinAbs(0.0, 1e-14));
  CHECK_THAT(f.r_squared, WithinAbs(1.0, 1e-14));

  // Residuals (+1, -1, -1, +1) around y = x: slope 1, stderr sqrt(2 / 5 / (n - 2)) = sqrt(4 / 2 / 5).
  const std::vector<double> yn{1.0, 0.0, 1.0, 4.0};
  const auto g = stats::ordinary_least_squares(x, yn);
  CHECK_THAT(g.slope, WithinAbs(1.0, 1e-14));
  CHECK_THAT(g.intercept, WithinAbs(0.0, 1e-14));
  CHECK_THAT(g.slope_stderr, WithinAbs(std::sqrt(4.0 / 2.0 / 5.0), 1e-14));

  const std::vector<double> same{1.0, 1.0};
  CHECK_THROWS_AS(stats::ordinary_least_squares(same, same), InvalidArgument);
}

TEST_CASE("distribution functions", "[stats]") {
  CHECK_THAT(2.0 * stats::normal_cdf(-1.0), WithinRel(0.31731050786291415, 1e-13));
  CHECK_THAT(stats::student_t_quantile(0.975, 10.0), WithinRel(2.2281388519649385, 1e-10));
  CHECK_THAT(stats::normal_two_sided_quantile(0.95), WithinRel(1.959963984540054, 1e-12));
}

TEST_CASE("Clopper-Pearson interval", "[stats]") {
  const auto [lo0, hi0] = stats::clopper_pearson(0, 10, 0.95);
  CHECK(lo0 == 0.0);
  // 1 - 0.025^{1/10}.
  CHECK_THAT(hi0, WithinRel(1.0 - std::pow(0.025, 0.1), 1e-10));
  const auto [lo5, hi5] = stats::clopper_pearson(5, 10, 0.95);
  CHECK_THAT(lo5, WithinAbs(0.187086, 1e-6));
  CHECK_THAT(hi5, WithinAbs(0.812914, 1e-6));
  const auto [lon, hin] = stats::clopper_pearson(10, 10, 0.95);
  CHECK_THAT(lon, WithinRel(std::pow(0.025, 0.1), 1e-10));
  CHECK(hin == 1.0);
  CHECK_THROWS_AS(stats::clopper_pearson(11, 10, 0.95), InvalidArgument);
}

TEST_CASE("Gaussian norm tails", "[stats]") {
  CHECK_THAT(stats::gaussian_norm_tail(1, 1.0 / 64.0, 1.0), WithinRel(2.0 * stats::normal_cdf(-8.0), 1e-10));
  CHECK_THAT(stats::gaussian_norm_tail(1, 1.0 / 64.0, 1.0), WithinRel(1.2441921148543639e-15, 1e-8));
  CHECK_THAT(stats::gaussian_norm_tail(1, 1.0, 1.0), WithinRel(0.31731050786291415, 1e-13));
  // d = 2: Rayleigh tail exp(-r^2 / (2 v)).
  CHECK_THAT(stats::gaussian_norm_tail(2, 0.5, 1.3), WithinRel(std::exp(-1.69 / 1.0), 1e-12));
  // d = 3: Maxwell tail 2 Phi(-z) + sqrt(2 / pi) z exp(-z^2 / 2), z = r / sqrt(v).
  const double z = 1.0 / std::sqrt(0.3);
  CHECK_THAT(stats::gaussian_norm_tail(3, 0.3, 1.0),
             WithinRel(2.0 * stats::normal_cdf(-z) + std::sqrt(2.0 / M_PI) * z * std::exp(-0.5 * z * z), 1e-12));
  CHECK(stats::gaussian_norm_tail(1, 0.0, 1.0) == 0.0);
}
