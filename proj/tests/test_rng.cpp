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

#include "emrates/rng.hpp"

using emrates::Philox4x32;
using emrates::RngStream;

TEST_CASE("philox known-answer vectors", "[rng]") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::encrypt({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::encrypt({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::encrypt({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are deterministic", "[rng]") {
  RngStream a(7, 5), b(7, 5);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  RngStream c(1, 0), d(1, 0);
  for (int i = 0; i < 1000; ++i) REQUIRE(c.normal() == d.normal());
}

TEST_CASE("distinct replica indices give distinct streams", "[rng]") {
  RngStream a = emrates::derive_stream(7, 0);
  RngStream b = emrates::derive_stream(7, 1);
  const std::uint64_t a0 = a.next_u64(), a1 = a.next_u64();
  const std::uint64_t b0 = b.next_u64(), b1 = b.next_u64();
  CHECK((a0 != b0 || a1 != b1));
  RngStream c(8, 0);
  CHECK(c.next_u64() != a0);
}

TEST_CASE("uniform draws stay in their half-open ranges", "[rng]") {
  RngStream r(3, 9);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    const double v = r.uniform_pos();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo < 1e-3);
  CHECK(hi > 1.0 - 1e-3);
  // Mean 1/2, standard error sqrt(1/12 / n).
  CHECK(std::fabs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("normal draws match standard normal moments", "[rng]") {
  RngStream r(11, 0);
  const int n = 100000;
  double s1 = 0.0, s2 = 0.0, s3abs = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
    s3abs += std::fabs(z * z * z);
    s4 += z * z * z * z;
  }
  CHECK(std::fabs(s1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::fabs(s2 / n - 1.0) < 0.02);
  // E|Z|^3 = 2 sqrt(2 / pi).
  CHECK(std::fabs(s3abs / n / (2.0 * std::sqrt(2.0 / M_PI)) - 1.0) < 0.05);
  CHECK(std::fabs(s4 / n - 3.0) < 0.1);
}

TEST_CASE("neighbouring streams are uncorrelated", "[rng]") {
  RngStream a = emrates::derive_stream(7, 0);
  RngStream b = emrates::derive_stream(7, 1);
  const int n = 100000;
  double sab = 0.0, sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a.normal(), y = b.normal();
    sab += x * y;
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double rho = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  CHECK(std::fabs(rho) < 0.02);
}
