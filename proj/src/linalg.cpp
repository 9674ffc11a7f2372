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

#include "emrates/linalg.hpp"

#include <cmath>

namespace emrates {

double determinant(const Mat& m, int d) {
  switch (d) {
    case 1:
      return at(m, 0, 0);
    case 2:
      return at(m, 0, 0) * at(m, 1, 1) - at(m, 0, 1) * at(m, 1, 0);
    default:
      return at(m, 0, 0) * (at(m, 1, 1) * at(m, 2, 2) - at(m, 1, 2) * at(m, 2, 1)) -
             at(m, 0, 1) * (at(m, 1, 0) * at(m, 2, 2) - at(m, 1, 2) * at(m, 2, 0)) +
             at(m, 0, 2) * (at(m, 1, 0) * at(m, 2, 1) - at(m, 1, 1) * at(m, 2, 0));
  }
}

bool solve_small(const Mat& m, const Vec& rhs, int d, double det_floor, Vec& x) {
  const double det = determinant(m, d);
  if (!(std::fabs(det) > det_floor)) return false;
  x = Vec{};
  switch (d) {
    case 1:
      x[0] = rhs[0] / det;
      return true;
    case 2:
      x[0] = (at(m, 1, 1) * rhs[0] - at(m, 0, 1) * rhs[1]) / det;
      x[1] = (at(m, 0, 0) * rhs[1] - at(m, 1, 0) * rhs[0]) / det;
      return true;
    default: {
      // Cramer's rule via the adjugate.
      Mat adj{};
      at(adj, 0, 0) = at(m, 1, 1) * at(m, 2, 2) - at(m, 1, 2) * at(m, 2, 1);
      at(adj, 0, 1) = at(m, 0, 2) * at(m, 2, 1) - at(m, 0, 1) * at(m, 2, 2);
      at(adj, 0, 2) = at(m, 0, 1) * at(m, 1, 2) - at(m, 0, 2) * at(m, 1, 1);
      at(adj, 1, 0) = at(m, 1, 2) * at(m, 2, 0) - at(m, 1, 0) * at(m, 2, 2);
      at(adj, 1, 1) = at(m, 0, 0) * at(m, 2, 2) - at(m, 0, 2) * at(m, 2, 0);
      at(adj, 1, 2) = at(m, 0, 2) * at(m, 1, 0) - at(m, 0, 0) * at(m, 1, 2);
      at(adj, 2, 0) = at(m, 1, 0) * at(m, 2, 1) - at(m, 1, 1) * at(m, 2, 0);
      at(adj, 2, 1) = at(m, 0, 1) * at(m, 2, 0) - at(m, 0, 0) * at(m, 2, 1);
      at(adj, 2, 2) = at(m, 0, 0) * at(m, 1, 1) - at(m, 0, 1) * at(m, 1, 0);
      const Vec y = apply(adj, rhs, 3);
      for (int i = 0; i < 3; ++i) x[i] = y[i] / det;
      return true;
    }
  }
}

}  // namespace emrates
