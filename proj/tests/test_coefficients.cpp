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

#include "emrates/coefficients.hpp"
#include "emrates/errors.hpp"
#include "emrates/rng.hpp"

using namespace emrates;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct CatalogueEntry {
  const char* name;
  std::vector<double> params;
};

const std::vector<CatalogueEntry> kDrifts{{"zero", {}},
                                          {"power", {0.5}},
                                          {"power_sum", {0.3, 0.7}},
                                          {"power_log", {0.5}},
                                          {"lipschitz_sublinear", {1.0}}};

}  // namespace

TEST_CASE("catalogue drift metadata", "[coefficients]") {
  const DriftSpec log_drift = builtin_drift("power_log", std::vector<double>{0.5}, 1);
  REQUIRE(log_drift.seminorm_bound.has_value());
  CHECK_THAT(*log_drift.seminorm_bound, WithinAbs(1.8057, 5e-5));
  CHECK(log_drift.holder_exponent == 0.5);
  CHECK(log_drift.growth == GrowthClass::sublinear);

  const DriftSpec zero = builtin_drift("zero", {}, 3);
  CHECK(zero.dimension == 3);
  CHECK(*zero.seminorm_bound == 0.0);
  CHECK(zero.value_at_zero == Vec{0.0, 0.0, 0.0});
  CHECK(zero(Vec{1.0, -2.0, 3.0}) == Vec{0.0, 0.0, 0.0});

  const DriftSpec power = builtin_drift("power", std::vector<double>{0.5}, 1);
  CHECK(power(Vec{4.0})[0] == 2.0);
  CHECK(power(Vec{-4.0})[0] == 2.0);

  const DriftSpec sum = builtin_drift("power_sum", std::vector<double>{0.7, 0.3}, 2);
  CHECK(sum.holder_exponent == 0.3);
}

TEST_CASE("catalogue rejects bad keys, exponents and dimensions", "[coefficients]") {
  CHECK_THROWS_AS(builtin_drift("cubic", {}, 1), InvalidArgument);
  CHECK_THROWS_AS(builtin_drift("power", std::vector<double>{1.5}, 1), InvalidArgument);
  CHECK_THROWS_AS(builtin_drift("power", std::vector<double>{0.0}, 1), InvalidArgument);
  CHECK_THROWS_AS(builtin_drift("power", std::vector<double>{1.0}, 1), InvalidArgument);
  CHECK_THROWS_AS(builtin_drift("power", std::vector<double>{0.5}, 0), InvalidArgument);
  CHECK_THROWS_AS(builtin_drift("power", std::vector<double>{0.5}, 4), InvalidArgument);
  CHECK_THROWS_AS(builtin_drift("power", {}, 1), InvalidArgument);
  CHECK_THROWS_AS(builtin_diffusion("sin_modulated", std::vector<double>{1.0}, 1), InvalidArgument);
  CHECK_THROWS_AS(builtin_diffusion("diagonal", {}, 1), InvalidArgument);
  try {
    builtin_drift("cubic", {}, 1);
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("cubic") != std::string::npos);
  }
}

TEST_CASE("seminorm of the square root matches a brute-force grid", "[coefficients]") {
  const DriftSpec power = builtin_drift("power", std::vector<double>{0.5}, 1);
  RngStream rng(1, 0);
  const double estimate = estimate_holder_seminorm(power.evaluate, 1, 0.5, 4.0, 1e-3, rng);

  // Independent oracle: all pairs of a 0.01 grid on [-4, 4] with |x - y| <= 1.
  double brute = 0.0;
  for (int i = -400; i <= 400; ++i)
    for (int j = i + 1; j <= i + 100 && j <= 400; ++j) {
      const double x = i * 0.01, y = j * 0.01;
      brute = std::max(brute, std::fabs(std::sqrt(std::fabs(x)) - std::sqrt(std::fabs(y))) /
                                  std::sqrt(y - x));
    }
  CHECK_THAT(brute, WithinAbs(1.0, 1e-12));
  CHECK(estimate >= brute - 1e-12);
  CHECK(estimate <= 1.0 + 1e-12);
}

TEST_CASE("seminorm of a constant is zero", "[coefficients]") {
  RngStream rng(2, 0);
  const ScalarField c = [](const Vec&) { return 3.5; };
  CHECK(estimate_holder_seminorm(c, 1, 0.5, 4.0, 1e-2, rng) == 0.0);
  CHECK(estimate_holder_seminorm(c, 2, 0.25, 2.0, 1e-1, rng, 100) == 0.0);
}

TEST_CASE("seminorm estimates respect declared bounds", "[coefficients]") {
  for (const auto& entry : kDrifts) {
    for (const int d : {1, 2}) {
      const DriftSpec b = builtin_drift(entry.name, entry.params, d);
      RngStream rng(3, static_cast<std::uint64_t>(d));
      const double h = d == 1 ? 1e-3 : 1e-2;
      const double est = estimate_holder_seminorm(b.evaluate, d, b.holder_exponent, 4.0, h, rng);
      INFO(entry.name << " d=" << d << " estimate " << est);
      CHECK(std::isfinite(est));
      CHECK(est <= *b.seminorm_bound * (1.0 + 1e-12));
      if (std::string(entry.name) != "zero") CHECK(est > 0.0);
    }
  }
  const DriftSpec log_drift = builtin_drift("power_log", std::vector<double>{0.5}, 1);
  RngStream rng(4, 0);
  const double est = estimate_holder_seminorm(log_drift.evaluate, 1, 0.5, 4.0, 1e-3, rng);
  CHECK(est > 0.0);
  CHECK(est <= 1.8057);
}

TEST_CASE("seminorm estimation reports non-finite evaluations", "[coefficients]") {
  RngStream rng(5, 0);
  const ScalarField bad = [](const Vec& x) { return 1.0 / x[0]; };
  CHECK_THROWS_AS(estimate_holder_seminorm(bad, 1, 0.5, 2.0, 1e-2, rng), SimulationError);
}

TEST_CASE("sub-linear growth ratios", "[coefficients]") {
  RngStream rng(6, 0);
  const DriftSpec power = builtin_drift("power", std::vector<double>{0.5}, 1);
  const std::vector<double> radii{1.0, 10.0, 100.0};
  const auto r = check_sublinear_growth(power.evaluate, 1, radii, 8, rng);
  REQUIRE(r.size() == 3);
  CHECK_THAT(r[0].ratio, WithinRel(1.0, 1e-14));
  CHECK_THAT(r[1].ratio, WithinRel(std::pow(10.0, -0.5), 1e-14));
  CHECK_THAT(r[2].ratio, WithinRel(0.1, 1e-14));
  CHECK(is_sublinear(r));

  const VectorField linear = [](const Vec& x) { return x; };
  const std::vector<double> two{1.0, 10.0};
  const auto lin = check_sublinear_growth(linear, 1, two, 8, rng);
  CHECK_THAT(lin[0].ratio, WithinRel(1.0, 1e-14));
  CHECK_THAT(lin[1].ratio, WithinRel(1.0, 1e-14));
  CHECK_FALSE(is_sublinear(lin));

  const DriftSpec sum = builtin_drift("power_sum", std::vector<double>{0.3, 0.7}, 1);
  const std::vector<double> wide{1.0, 100.0};
  const auto s = check_sublinear_growth(sum.evaluate, 1, wide, 8, rng);
  CHECK_THAT(s[0].ratio, WithinRel(2.0, 1e-14));
  // (100^0.3 + 100^0.7) / 100 = 100^-0.7 + 100^-0.3.
  CHECK_THAT(s[1].ratio, WithinRel(std::pow(100.0, -0.7) + std::pow(100.0, -0.3), 1e-14));
  CHECK_THAT(s[1].ratio, WithinAbs(0.2910, 1e-4));

  const std::vector<double> empty;
  CHECK_THROWS_AS(check_sublinear_growth(linear, 1, empty, 8, rng), InvalidArgument);
}

TEST_CASE("every catalogue drift is sub-linear over four decades", "[coefficients]") {
  const std::vector<double> radii{1.0, 10.0, 100.0, 1000.0};
  for (const auto& entry : kDrifts)
    for (const int d : {1, 2, 3}) {
      RngStream rng(7, static_cast<std::uint64_t>(d));
      const DriftSpec b = builtin_drift(entry.name, entry.params, d);
      const auto r = check_sublinear_growth(b.evaluate, d, radii, 16, rng);
      INFO(entry.name << " d=" << d);
      CHECK(is_sublinear(r));
    }
}

TEST_CASE("catalogue drifts satisfy the linear growth bound", "[coefficients]") {
  RngStream rng(8, 0);
  for (const auto& entry : kDrifts)
    for (const int d : {1, 3}) {
      const DriftSpec b = builtin_drift(entry.name, entry.params, d);
      const double b0 = norm(b.value_at_zero, d);
      for (int k = 0; k < 2000; ++k) {
        Vec x{};
        const double radius = std::pow(10.0, 3.0 * rng.uniform());
        for (int i = 0; i < d; ++i) x[i] = rng.normal();
        const double nx = norm(x, d);
        for (int i = 0; i < d; ++i) x[i] *= radius / nx;
        INFO(entry.name << " |x|=" << radius);
        REQUIRE(norm(b(x), d) <= b0 + *b.seminorm_bound * (1.0 + radius));
      }
    }
}

TEST_CASE("ellipticity bounds", "[coefficients]") {
  RngStream rng(9, 0);
  const auto id = check_ellipticity(builtin_diffusion("identity", {}, 3), 50, rng);
  CHECK(id.lambda_min == 1.0);
  CHECK(id.lambda_max == 1.0);

  const DiffusionSpec two = builtin_diffusion("scaled_identity", std::vector<double>{2.0}, 2);
  CHECK(two.ellipticity_lambda == 4.0);
  const auto b2 = check_ellipticity(two, 50, rng);
  CHECK(b2.lambda_min == 4.0);
  CHECK(b2.lambda_max == 4.0);
  CHECK(b2.lambda_max <= two.ellipticity_lambda);
  CHECK(b2.lambda_min >= 1.0 / two.ellipticity_lambda);

  const DiffusionSpec sin = builtin_diffusion("sin_modulated", std::vector<double>{0.5}, 1);
  const auto bs = check_ellipticity(sin, 20000, rng);
  CHECK(bs.lambda_min >= 0.25);
  CHECK(bs.lambda_max <= 2.25);
  CHECK(bs.lambda_min < 0.2501);
  CHECK(bs.lambda_max > 2.2499);
  CHECK(bs.lambda_min >= 1.0 / sin.ellipticity_lambda);
  CHECK(bs.lambda_max <= sin.ellipticity_lambda);

  const DiffusionSpec singular = DiffusionSpec::custom(
      "singular", 2, [](const Vec&) { return Mat{1, 0, 0, 0, 0, 0, 0, 0, 0}; }, 1.0, true);
  CHECK_THROWS_AS(check_ellipticity(singular, 5, rng), EllipticityError);
}

TEST_CASE("test function declarations are checked", "[coefficients]") {
  RngStream rng(10, 0);
  const auto ok = builtin_test_functions("power", std::vector<double>{0.5}, "tanh", {}, 2);
  CHECK(check_test_function(ok, 2000, rng).empty());
  CHECK(ok.f_at_zero == 0.0);

  TestFunctionSpec wrong = ok;
  wrong.g = [](const Vec& x) { return 2.0 * std::tanh(x[0]); };
  CHECK_FALSE(check_test_function(wrong, 2000, rng).empty());

  CHECK_THROWS_AS(builtin_test_functions("cube", {}, "one", {}, 1), InvalidArgument);
  CHECK_THROWS_AS(builtin_test_functions("linear", {}, "sigmoid", {}, 1), InvalidArgument);
}
