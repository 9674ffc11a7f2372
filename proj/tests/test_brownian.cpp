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

#include "emrates/brownian.hpp"
#include "emrates/errors.hpp"
#include "emrates/rng.hpp"

using namespace emrates;

TEST_CASE("time grid nodes and kappa", "[brownian]") {
  const TimeGrid g(4, 1.0);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(4) == 1.0);
  CHECK(g.node(1) == 0.25);
  for (int k = 0; k < 4; ++k) CHECK(g.node(k) < g.node(k + 1));
  CHECK(g.kappa(0.0) == 0.0);
  CHECK(g.kappa(0.3) == 0.25);
  CHECK(g.kappa(0.25) == 0.25);
  CHECK(g.kappa(0.9999) == 0.75);
  CHECK(g.kappa(1.0) == 0.75);
  CHECK(g.node_index(0.5) == 2);
  CHECK_THROWS_AS(g.node_index(0.3), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid(0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(TimeGrid(4, 0.0), InvalidArgument);
  const TimeGrid odd(3, 0.7);
  CHECK(odd.node(3) == 0.7);
}

TEST_CASE("sample_path is deterministic", "[brownian]") {
  const TimeGrid g(4, 1.0);
  RngStream a(1, 0), b(1, 0);
  const BrownianPath p = sample_path(a, g, 1);
  const BrownianPath q = sample_path(b, g, 1);
  CHECK(p.increments() == q.increments());
  CHECK(p.value(0)[0] == 0.0);
  RngStream c(1, 0);
  CHECK_THROWS_AS(sample_path(c, g, 0), InvalidArgument);
}

TEST_CASE("terminal value has mean 0 and variance T", "[brownian]") {
  const TimeGrid g(64, 1.0);
  const int n = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream r = derive_stream(42, static_cast<std::uint64_t>(i));
    const double bt = sample_path(r, g, 1).value(64, 0);
    s1 += bt;
    s2 += bt * bt;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 0.05);
}

TEST_CASE("increments have Gaussian third absolute moment", "[brownian]") {
  const TimeGrid g(16, 2.0);
  const double sd = std::sqrt(2.0 / 16.0);
  double s3 = 0.0;
  int count = 0;
  for (int i = 0; i < 6250; ++i) {
    RngStream r = derive_stream(43, static_cast<std::uint64_t>(i));
    const BrownianPath p = sample_path(r, g, 1);
    for (int k = 0; k < 16; ++k) {
      const double z = p.increment(k)[0] / sd;
      s3 += std::fabs(z * z * z);
      ++count;
    }
  }
  CHECK(std::fabs(s3 / count / (2.0 * std::sqrt(2.0 / M_PI)) - 1.0) < 0.05);
}

TEST_CASE("coarsen sums adjacent increments", "[brownian]") {
  const std::vector<double> inc{0.5, 0.25, 1.0, -0.75};
  const BrownianPath p = BrownianPath::from_increments(TimeGrid(4, 1.0), 1, inc);
  const BrownianPath c = coarsen(p, 2);
  CHECK(c.grid().steps() == 2);
  CHECK(c.increments() == std::vector<double>{0.75, 0.25});

  const BrownianPath same = coarsen(p, 1);
  CHECK(same.increments() == p.increments());
  CHECK(std::vector<double>(same.node_values().begin(), same.node_values().end()) ==
        std::vector<double>(p.node_values().begin(), p.node_values().end()));
  CHECK_THROWS_AS(coarsen(p, 3), InvalidArgument);
  CHECK_THROWS_AS(coarsen(p, 0), InvalidArgument);
}

TEST_CASE("coarsening composes and preserves shared nodes bitwise", "[brownian]") {
  const TimeGrid g(64, 1.0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    RngStream r(99, s);
    const BrownianPath p = sample_path(r, g, 2);
    const BrownianPath a = coarsen(coarsen(p, 2), 2);
    const BrownianPath b = coarsen(p, 4);
    REQUIRE(std::vector<double>(a.node_values().begin(), a.node_values().end()) ==
            std::vector<double>(b.node_values().begin(), b.node_values().end()));
    for (const std::int64_t m : {2, 4, 8, 16, 32, 64}) {
      const BrownianPath c = coarsen(p, m);
      for (std::int64_t k = 0; k <= c.grid().steps(); ++k) {
        REQUIRE(c.value(k, 0) == p.value(k * m, 0));
        REQUIRE(c.value(k, 1) == p.value(k * m, 1));
      }
    }
  }
}
