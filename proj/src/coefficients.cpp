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

#include "emrates/coefficients.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "emrates/errors.hpp"

namespace emrates {
namespace {

void check_dimension(int d) {
  if (d <= 0 || d > kMaxDim)
    throw InvalidArgument("dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
                          std::to_string(d));
}

double open_unit_exponent(const std::string& key, std::span<const double> params, std::size_t i,
                          const char* what) {
  if (params.size() <= i)
    throw InvalidArgument("drift '" + key + "' needs parameter " + what);
  const double e = params[i];
  if (!(e > 0.0 && e < 1.0))
    throw InvalidArgument("drift '" + key + "': exponent " + what + " must lie in (0, 1)");
  return e;
}

void expect_params(const std::string& kind, const std::string& key, std::span<const double> params,
                   std::size_t lo, std::size_t hi) {
  if (params.size() < lo || params.size() > hi) {
    std::ostringstream os;
    os << kind << " '" << key << "' takes " << lo;
    if (hi != lo) os << ".." << hi;
    os << " parameter(s), got " << params.size();
    throw InvalidArgument(os.str());
  }
}

/// b(x) = profile(|x|) (1, ..., 1) / sqrt(d).
template <class Profile>
VectorField radial(int d, Profile profile) {
  const double unit = 1.0 / std::sqrt(static_cast<double>(d));
  return [d, unit, profile](const Vec& x) {
    const double r = norm(x, d);
    const double v = profile(r) * unit;
    Vec out{};
    for (int i = 0; i < d; ++i) out[i] = v;
    return out;
  };
}

Vec random_direction(RngStream& rng, int d) {
  for (;;) {
    Vec v{};
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    const double n = norm(v, d);
    if (n > 1e-12) {
      for (int i = 0; i < d; ++i) v[i] /= n;
      return v;
    }
  }
}

std::vector<Vec> fixed_directions(int d) {
  std::vector<Vec> dirs;
  for (int i = 0; i < d; ++i) {
    Vec e{};
    e[i] = 1.0;
    dirs.push_back(e);
    e[i] = -1.0;
    dirs.push_back(e);
  }
  if (d > 1) {
    Vec diag{};
    for (int i = 0; i < d; ++i) diag[i] = 1.0 / std::sqrt(static_cast<double>(d));
    dirs.push_back(diag);
    for (int i = 0; i < d; ++i) diag[i] = -diag[i];
    dirs.push_back(diag);
  }
  return dirs;
}

Vec checked_eval(const VectorField& f, const Vec& x, int d) {
  const Vec v = f(x);
  if (!all_finite(v, kMaxDim)) {
    std::ostringstream os;
    os << "non-finite evaluation at x = (";
    for (int i = 0; i < d; ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    throw SimulationError(os.str());
  }
  return v;
}

double distance(const Vec& a, const Vec& b) {
  Vec diff{};
  for (int i = 0; i < kMaxDim; ++i) diff[i] = a[i] - b[i];
  return norm(diff, kMaxDim);
}

}  // namespace

DriftSpec DriftSpec::custom(std::string name, int d, VectorField fn, double alpha,
                            std::optional<double> seminorm_bound, GrowthClass growth) {
  check_dimension(d);
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidArgument("Hoelder exponent must lie in (0, 1]");
  if (seminorm_bound && !(*seminorm_bound >= 0.0))
    throw InvalidArgument("seminorm bound must be nonnegative");
  if (!fn) throw InvalidArgument("drift evaluator is empty");
  DriftSpec spec;
  spec.name = std::move(name);
  spec.dimension = d;
  spec.evaluate = std::move(fn);
  spec.holder_exponent = alpha;
  spec.seminorm_bound = seminorm_bound;
  spec.growth = growth;
  spec.value_at_zero = spec.evaluate(Vec{});
  return spec;
}

DiffusionSpec DiffusionSpec::custom(std::string name, int d, MatrixField fn, double lambda,
                                    bool is_constant) {
  check_dimension(d);
  if (!(lambda >= 1.0)) throw InvalidArgument("ellipticity constant must be >= 1");
  if (!fn) throw InvalidArgument("diffusion evaluator is empty");
  DiffusionSpec spec;
  spec.name = std::move(name);
  spec.dimension = d;
  spec.evaluate = std::move(fn);
  spec.ellipticity_lambda = lambda;
  spec.is_constant = is_constant;
  spec.smoothness = is_constant ? Smoothness::constant : Smoothness::cb3;
  return spec;
}

ProblemSpec::ProblemSpec(Vec x0_, double horizon_, DriftSpec drift_, DiffusionSpec diffusion_)
    : dimension(drift_.dimension),
      x0(x0_),
      horizon(horizon_),
      drift(std::move(drift_)),
      diffusion(std::move(diffusion_)) {
  if (diffusion.dimension != dimension)
    throw InvalidArgument("drift and diffusion dimensions differ");
  if (!(std::isfinite(horizon) && horizon > 0.0))
    throw InvalidArgument("horizon T must be finite and positive");
  for (int i = dimension; i < kMaxDim; ++i) x0[i] = 0.0;
  if (!all_finite(x0, dimension)) throw InvalidArgument("x0 must be finite");
}

ProblemSpec ProblemSpec::driftless() const {
  return ProblemSpec(x0, horizon, builtin_drift("zero", {}, dimension), diffusion);
}

DriftSpec builtin_drift(const std::string& name, std::span<const double> params, int d) {
  check_dimension(d);
  if (name == "zero") {
    expect_params("drift", name, params, 0, 0);
    DriftSpec zero = DriftSpec::custom(name, d, [](const Vec&) { return Vec{}; }, 1.0, 0.0);
    zero.vanishes = true;
    return zero;
  }
  if (name == "power") {
    expect_params("drift", name, params, 1, 1);
    const double a = open_unit_exponent(name, params, 0, "alpha");
    return DriftSpec::custom(name, d, radial(d, [a](double r) { return std::pow(r, a); }), a, 1.0);
  }
  if (name == "power_sum") {
    expect_params("drift", name, params, 2, 2);
    const double a = open_unit_exponent(name, params, 0, "alpha");
    const double b = open_unit_exponent(name, params, 1, "beta");
    // Each term has [.]_gamma <= 1 on |x - y| <= 1 for gamma = min(a, b).
    return DriftSpec::custom(
        name, d, radial(d, [a, b](double r) { return std::pow(r, a) + std::pow(r, b); }),
        std::min(a, b), 2.0);
  }
  if (name == "power_log") {
    expect_params("drift", name, params, 1, 1);
    const double a = open_unit_exponent(name, params, 0, "alpha");
    return DriftSpec::custom(
        name, d, radial(d, [a](double r) { return std::pow(r, a) * std::log(2.0 + r); }), a,
        std::log(3.0) + std::pow(2.0, a - 1.0));
  }
  if (name == "lipschitz_sublinear") {
    expect_params("drift", name, params, 0, 1);
    const double c = params.empty() ? 1.0 : params[0];
    if (!std::isfinite(c)) throw InvalidArgument("drift 'lipschitz_sublinear': c must be finite");
    // Radial derivative (1 + s/2)/(1 + s)^2 <= 1 and tangential 1/(1 + s) <= 1, s = |x|^{1/2}.
    return DriftSpec::custom(
        name, d,
        [d, c](const Vec& x) {
          const double scale = c / (1.0 + std::sqrt(norm(x, d)));
          Vec out{};
          for (int i = 0; i < d; ++i) out[i] = scale * x[i];
          return out;
        },
        1.0, std::fabs(c));
  }
  throw InvalidArgument("unknown drift catalogue key '" + name + "'");
}

DiffusionSpec builtin_diffusion(const std::string& name, std::span<const double> params, int d) {
  check_dimension(d);
  if (name == "identity") {
    expect_params("diffusion", name, params, 0, 0);
    const Mat id = identity_matrix(d);
    return DiffusionSpec::custom(name, d, [id](const Vec&) { return id; }, 1.0, true);
  }
  if (name == "scaled_identity") {
    expect_params("diffusion", name, params, 1, 1);
    const double c = params[0];
    if (!(std::isfinite(c) && c != 0.0))
      throw InvalidArgument("diffusion 'scaled_identity': c must be finite and nonzero");
    const Mat m = identity_matrix(d, c);
    const double c2 = c * c;
    return DiffusionSpec::custom(name, d, [m](const Vec&) { return m; }, std::max(c2, 1.0 / c2),
                                 true);
  }
  if (name == "sin_modulated") {
    expect_params("diffusion", name, params, 0, 1);
    const double amp = params.empty() ? 0.5 : params[0];
    if (!(std::fabs(amp) < 1.0))
      throw InvalidArgument("diffusion 'sin_modulated': |amp| must be < 1");
    const double hi = (1.0 + std::fabs(amp)) * (1.0 + std::fabs(amp));
    const double lo = (1.0 - std::fabs(amp)) * (1.0 - std::fabs(amp));
    return DiffusionSpec::custom(
        name, d,
        [d, amp](const Vec& x) {
          double s = 0.0;
          for (int i = 0; i < d; ++i) s += x[i];
          return identity_matrix(d, 1.0 + amp * std::sin(s));
        },
        std::max(hi, 1.0 / lo), amp == 0.0);
  }
  throw InvalidArgument("unknown diffusion catalogue key '" + name + "'");
}

TestFunctionSpec builtin_test_functions(const std::string& f_name, std::span<const double> f_params,
                                        const std::string& g_name, std::span<const double> g_params,
                                        int d) {
  check_dimension(d);
  TestFunctionSpec spec;
  spec.dimension = d;
  if (f_name == "power") {
    expect_params("test function f", f_name, f_params, 1, 1);
    const double a = f_params[0];
    if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("test function f 'power': alpha must lie in (0, 1]");
    spec.f = [d, a](const Vec& x) { return std::pow(norm(x, d), a); };
    spec.f_holder_exponent = a;
    spec.f_seminorm_bound = 1.0;
  } else if (f_name == "linear") {
    expect_params("test function f", f_name, f_params, 0, 0);
    spec.f = [](const Vec& x) { return x[0]; };
    spec.f_seminorm_bound = 1.0;
  } else if (f_name == "constant") {
    expect_params("test function f", f_name, f_params, 1, 1);
    const double c = f_params[0];
    spec.f = [c](const Vec&) { return c; };
    spec.f_seminorm_bound = 0.0;
  } else {
    throw InvalidArgument("unknown test function f key '" + f_name + "'");
  }
  spec.f_at_zero = spec.f(Vec{});

  if (g_name == "one") {
    expect_params("test function g", g_name, g_params, 0, 0);
    spec.g = [](const Vec&) { return 1.0; };
    spec.g_sup_norm = 1.0;
    spec.g_lipschitz = 0.0;
  } else if (g_name == "constant") {
    expect_params("test function g", g_name, g_params, 1, 1);
    const double c = g_params[0];
    spec.g = [c](const Vec&) { return c; };
    spec.g_sup_norm = std::fabs(c);
    spec.g_lipschitz = 0.0;
  } else if (g_name == "tanh") {
    expect_params("test function g", g_name, g_params, 0, 0);
    spec.g = [](const Vec& x) { return std::tanh(x[0]); };
    spec.g_sup_norm = 1.0;
    spec.g_lipschitz = 1.0;
  } else {
    throw InvalidArgument("unknown test function g key '" + g_name + "'");
  }
  return spec;
}

std::vector<std::string> drift_catalogue() {
  return {"zero", "power", "power_sum", "power_log", "lipschitz_sublinear"};
}

std::vector<std::string> diffusion_catalogue() {
  return {"identity", "scaled_identity", "sin_modulated"};
}

double estimate_holder_seminorm(const VectorField& field, int d, double alpha, double radius,
                                double resolution, RngStream& rng, int random_pairs) {
  check_dimension(d);
  if (!(radius >= 1.0)) throw InvalidArgument("seminorm search radius must be >= 1");
  if (!(resolution > 0.0 && resolution < 1.0))
    throw InvalidArgument("seminorm resolution must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");

  std::vector<double> scales;
  for (double s = 1.0; s >= resolution; s *= 0.5) scales.push_back(s);
  const auto dirs = fixed_directions(d);

  // Lattice spacing: h in 1-D, coarser in higher dimensions to bound the work.
  constexpr double kMaxCentres = 2.0e5;
  const double per_axis = std::floor(std::pow(kMaxCentres, 1.0 / d));
  const double spacing = std::max(resolution, 2.0 * radius / std::max(per_axis - 1.0, 1.0));
  const long half = static_cast<long>(std::floor(radius / spacing));

  double best = 0.0;
  auto consider = [&](const Vec& x, const Vec& fx, const Vec& y) {
    const Vec fy = checked_eval(field, y, d);
    const double sep = distance(x, y);
    if (sep <= 0.0 || sep > 1.0) return;
    best = std::max(best, distance(fx, fy) / std::pow(sep, alpha));
  };

  std::array<long, kMaxDim> idx{};
  for (int i = 0; i < d; ++i) idx[i] = -half;
  for (;;) {
    Vec x{};
    for (int i = 0; i < d; ++i) x[i] = static_cast<double>(idx[i]) * spacing;
    const Vec fx = checked_eval(field, x, d);
    for (const double s : scales)
      for (const Vec& u : dirs) {
        Vec y = x;
        for (int i = 0; i < d; ++i) y[i] += s * u[i];
        consider(x, fx, y);
      }
    int k = 0;
    while (k < d && ++idx[k] > half) idx[k++] = -half;
    if (k == d) break;
  }

  const double log_h = std::log(resolution);
  for (int p = 0; p < random_pairs; ++p) {
    Vec x{};
    for (int i = 0; i < d; ++i) x[i] = radius * (2.0 * rng.uniform() - 1.0);
    const Vec u = random_direction(rng, d);
    const double sep = std::exp(log_h * rng.uniform());
    Vec y = x;
    for (int i = 0; i < d; ++i) y[i] += sep * u[i];
    consider(x, checked_eval(field, x, d), y);
  }
  return best;
}

double estimate_holder_seminorm(const ScalarField& field, int d, double alpha, double radius,
                                double resolution, RngStream& rng, int random_pairs) {
  const VectorField lifted = [field](const Vec& x) { return Vec{field(x), 0.0, 0.0}; };
  return estimate_holder_seminorm(lifted, d, alpha, radius, resolution, rng, random_pairs);
}

std::vector<GrowthSample> check_sublinear_growth(const VectorField& field, int d,
                                                 std::span<const double> radii,
                                                 int samples_per_shell, RngStream& rng) {
  check_dimension(d);
  if (radii.empty()) throw InvalidArgument("radii must not be empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 1.0)) throw InvalidArgument("radii must be >= 1");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw InvalidArgument("radii must be strictly increasing");
  }
  const auto dirs = fixed_directions(d);
  std::vector<GrowthSample> out;
  for (const double r : radii) {
    double worst = 0.0;
    auto probe = [&](const Vec& u) {
      Vec x{};
      for (int i = 0; i < d; ++i) x[i] = r * u[i];
      worst = std::max(worst, norm(checked_eval(field, x, d), kMaxDim));
    };
    for (const Vec& u : dirs) probe(u);
    if (d > 1)
      for (int s = 0; s < samples_per_shell; ++s) probe(random_direction(rng, d));
    out.push_back({r, worst / r});
  }
  return out;
}

bool is_sublinear(std::span<const GrowthSample> samples) {
  if (std::all_of(samples.begin(), samples.end(), [](const GrowthSample& s) { return s.ratio == 0.0; }))
    return true;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].ratio < samples[i - 1].ratio)) return false;
  return true;
}

EllipticityBounds check_ellipticity(const DiffusionSpec& sigma, int sample_points, RngStream& rng,
                                    double radius) {
  if (sample_points < 1) throw InvalidArgument("sample_points must be >= 1");
  const int d = sigma.dimension;
  EllipticityBounds bounds{std::numeric_limits<double>::infinity(), 0.0};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  for (int s = 0; s < sample_points; ++s) {
    Vec x{};
    for (int i = 0; i < d; ++i) x[i] = radius * (2.0 * rng.uniform() - 1.0);
    const Mat a = gram(sigma(x), d);
    double lo, hi;
    if (d == 1) {
      lo = hi = at(a, 0, 0);
    } else {
      Eigen::MatrixXd m(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = at(a, i, j);
      solver.compute(m, Eigen::EigenvaluesOnly);
      lo = solver.eigenvalues().minCoeff();
      hi = solver.eigenvalues().maxCoeff();
    }
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw SimulationError("non-finite diffusion matrix in ellipticity check");
    if (lo < 1e-12 * std::max(1.0, hi)) {
      std::ostringstream os;
      os << "singular diffusion: smallest eigenvalue of sigma sigma^T is " << lo << " at x_1 = " << x[0];
      throw EllipticityError(os.str());
    }
    bounds.lambda_min = std::min(bounds.lambda_min, lo);
    bounds.lambda_max = std::max(bounds.lambda_max, hi);
  }
  return bounds;
}

std::vector<std::string> check_test_function(const TestFunctionSpec& spec, int samples,
                                             RngStream& rng, double radius) {
  std::vector<std::string> violations;
  const int d = spec.dimension;
  auto point = [&] {
    Vec x{};
    for (int i = 0; i < d; ++i) x[i] = radius * (2.0 * rng.uniform() - 1.0);
    return x;
  };
  constexpr double kSlack = 1e-12;
  for (int s = 0; s < samples; ++s) {
    const Vec x = point();
    const double gx = spec.g(x);
    if (std::fabs(gx) > spec.g_sup_norm * (1.0 + kSlack) + kSlack) {
      violations.push_back("g exceeds its declared sup norm at x_1 = " + std::to_string(x[0]));
      break;
    }
  }
  for (int s = 0; s < samples; ++s) {
    const Vec x = point();
    Vec y = x;
    const Vec u = random_direction(rng, d);
    const double sep = rng.uniform_pos();
    for (int i = 0; i < d; ++i) y[i] += sep * u[i];
    const double diff = std::fabs(spec.g(x) - spec.g(y));
    if (diff > spec.g_lipschitz * sep * (1.0 + kSlack) + kSlack) {
      violations.push_back("g exceeds its declared Lipschitz constant near x_1 = " +
                           std::to_string(x[0]));
      break;
    }
  }
  return violations;
}

}  // namespace emrates
