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

#pragma once

// Small fixed-capacity vectors and matrices for states in R^d, d <= 3.
// Components beyond the active dimension are kept at zero.

#include <array>
#include <cmath>
#include <cstddef>

namespace emrates {

inline constexpr int kMaxDim = 3;

using Vec = std::array<double, kMaxDim>;
/// Row-major d x d block stored in a 3 x 3 array.
using Mat = std::array<double, kMaxDim * kMaxDim>;

inline constexpr double& at(Mat& m, int i, int j) { return m[i * kMaxDim + j]; }
inline constexpr double at(const Mat& m, int i, int j) { return m[i * kMaxDim + j]; }

inline Mat identity_matrix(int d, double scale = 1.0) {
  Mat m{};
  for (int i = 0; i < d; ++i) at(m, i, i) = scale;
  return m;
}

inline double norm(const Vec& v, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

inline double dot(const Vec& a, const Vec& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

/// y = m * x on the leading d x d block.
inline Vec apply(const Mat& m, const Vec& x, int d) {
  Vec y{};
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += at(m, i, j) * x[j];
    y[i] = s;
  }
  return y;
}

/// a = m * m^T on the leading d x d block.
inline Mat gram(const Mat& m, int d) {
  Mat a{};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += at(m, i, k) * at(m, j, k);
      at(a, i, j) = s;
    }
  return a;
}

inline bool all_finite(const Vec& v, int d) {
  for (int i = 0; i < d; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

/// Solves m * x = rhs for d <= 3 by cofactor expansion. Returns false when
/// |det| falls below `det_floor` (the caller's conditioning guard).
bool solve_small(const Mat& m, const Vec& rhs, int d, double det_floor, Vec& x);

/// Determinant of the leading d x d block.
double determinant(const Mat& m, int d);

}  // namespace emrates
