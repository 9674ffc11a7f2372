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

// Drift and diffusion descriptors with regularity metadata, the built-in
// catalogue, and numerical validators for the claimed regularity.
//
// Metadata (Hoelder exponent, seminorm bound, growth class, ellipticity
// constant) is trusted at construction. The check_* functions below are the
// only place it is verified; evaluators are never wrapped in runtime checks.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emrates/linalg.hpp"
#include "emrates/rng.hpp"

namespace emrates {

enum class GrowthClass { sublinear, linear };
enum class Smoothness { cb3, constant };

using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;

/// Drift b : R^d -> R^d. Evaluators must be pure and total.
struct DriftSpec {
  std::string name;
  int dimension = 1;
  VectorField evaluate;
  double holder_exponent = 1.0;
  std::optional<double> seminorm_bound;
  GrowthClass growth = GrowthClass::sublinear;
  Vec value_at_zero{};
  bool vanishes = false;  ///< identically zero (the catalogue's "zero")

  /// Builds a drift from an arbitrary evaluator; validates d and alpha and
  /// computes b(0).
  static DriftSpec custom(std::string name, int d, VectorField fn, double alpha,
                          std::optional<double> seminorm_bound,
                          GrowthClass growth = GrowthClass::sublinear);

  Vec operator()(const Vec& x) const { return evaluate(x); }
};

/// Diffusion sigma : R^d -> R^{d x d}.
struct DiffusionSpec {
  std::string name;
  int dimension = 1;
  MatrixField evaluate;
  double ellipticity_lambda = 1.0;
  bool is_constant = true;
  Smoothness smoothness = Smoothness::constant;

  static DiffusionSpec custom(std::string name, int d, MatrixField fn, double lambda,
                              bool is_constant);

  Mat operator()(const Vec& x) const { return evaluate(x); }
};

/// The SDE dX = b(X) dt + sigma(X) dB on [0, T], X_0 = x0.
struct ProblemSpec {
  int dimension = 1;
  Vec x0{};
  double horizon = 1.0;
  DriftSpec drift;
  DiffusionSpec diffusion;

  ProblemSpec(Vec x0, double horizon, DriftSpec drift, DiffusionSpec diffusion);

  /// Same diffusion and start point with b replaced by 0.
  ProblemSpec driftless() const;
};

/// Integrand test functions f (Hoelder) and g (bounded Lipschitz).
struct TestFunctionSpec {
  int dimension = 1;
  ScalarField f;
  double f_holder_exponent = 1.0;
  double f_seminorm_bound = 0.0;
  double f_at_zero = 0.0;
  ScalarField g;
  double g_sup_norm = 1.0;
  double g_lipschitz = 0.0;
};

/// Catalogue keys: zero, power, power_sum, power_log, lipschitz_sublinear.
///   power {alpha}            b_i(x) = |x|^alpha / sqrt(d)
///   power_sum {alpha, beta}  b_i(x) = (|x|^alpha + |x|^beta) / sqrt(d)
///   power_log {alpha}        b_i(x) = |x|^alpha log(2 + |x|) / sqrt(d)
///   lipschitz_sublinear {c}  b(x)   = c x / (1 + |x|^{1/2})      (c defaults to 1)
/// The radial drifts point along (1, ..., 1)/sqrt(d), so |b(x)| equals the
/// scalar profile and the seminorm bound carries over from d = 1.
DriftSpec builtin_drift(const std::string& name, std::span<const double> params, int d);

/// Catalogue keys: identity, scaled_identity {c}, sin_modulated {amp}.
///   sin_modulated: sigma(x) = (1 + amp sin(x_1 + ... + x_d)) I_d, |amp| < 1.
DiffusionSpec builtin_diffusion(const std::string& name, std::span<const double> params, int d);

/// f keys: power {alpha} (|x|^alpha), linear (x_1), constant {c}.
/// g keys: one, constant {c}, tanh (tanh(x_1)).
TestFunctionSpec builtin_test_functions(const std::string& f_name, std::span<const double> f_params,
                                        const std::string& g_name, std::span<const double> g_params,
                                        int d);

std::vector<std::string> drift_catalogue();
std::vector<std::string> diffusion_catalogue();

/// Lower bound for [field]_alpha := sup_{0 < |x - y| <= 1} |f(x) - f(y)| / |x - y|^alpha.
///
/// Pairs come from a deterministic lattice of centres in [-R, R]^d (spacing
/// h in d = 1, coarsened in higher d so that at most ~2e5 centres are used)
/// offset along the coordinate axes and the main diagonal at scales
/// 1, 1/2, 1/4, ..., >= h, plus `random_pairs` random pairs with
/// log-uniform separation in [h, 1]. Throws SimulationError on a non-finite
/// evaluation.
double estimate_holder_seminorm(const VectorField& field, int d, double alpha, double radius,
                                double resolution, RngStream& rng, int random_pairs = 10000);
double estimate_holder_seminorm(const ScalarField& field, int d, double alpha, double radius,
                                double resolution, RngStream& rng, int random_pairs = 10000);

struct GrowthSample {
  double radius;
  double ratio;  ///< max_{|x| = R} |f(x)| / R over the sampled shell
};

/// Ratios max_{|x|=R}|f(x)|/R on each shell. Shells are sampled at the
/// coordinate and diagonal directions plus `samples_per_shell` random unit
/// directions (d = 1 uses the two points +-R).
std::vector<GrowthSample> check_sublinear_growth(const VectorField& field, int d,
                                                 std::span<const double> radii,
                                                 int samples_per_shell, RngStream& rng);

/// True when the ratio sequence is strictly decreasing from the second entry on
/// (i.e. ratio[i+1] < ratio[i] for all i >= 0), or identically zero.
bool is_sublinear(std::span<const GrowthSample> samples);

struct EllipticityBounds {
  double lambda_min;
  double lambda_max;
};

/// Extreme eigenvalues of a(x) = sigma(x) sigma(x)^T, i.e. the min/max Rayleigh
/// quotients over unit xi, over `sample_points` states drawn uniformly from
/// [-radius, radius]^d. Throws EllipticityError if a sampled a(x) is singular.
EllipticityBounds check_ellipticity(const DiffusionSpec& sigma, int sample_points, RngStream& rng,
                                    double radius = 10.0);

/// Checks the declared sup norm and Lipschitz constant of g on random points
/// and pairs in [-radius, radius]^d; returns human-readable violations.
std::vector<std::string> check_test_function(const TestFunctionSpec& spec, int samples,
                                             RngStream& rng, double radius = 10.0);

}  // namespace emrates
