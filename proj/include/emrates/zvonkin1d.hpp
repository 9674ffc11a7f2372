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

// One-dimensional resolvent equation
//
//   lambda u - (1/2) a u'' - b u' = f     on [-R, R]
//
// solved by second-order central differences and a tridiagonal direct solve,
// and the pathwise drift-removal identity
//
//   int_0^t b(X_s) ds = u(x0) - u(X_t) + lambda int_0^t u(X_s) ds + int_0^t u'(X_s) sigma(X_s) dB_s
//
// for the solution u of the equation with f = b.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emrates/coefficients.hpp"
#include "emrates/estimators.hpp"
#include "emrates/scheme.hpp"

namespace emrates::zvonkin {

using ScalarFunction = std::function<double(double)>;

struct ResolventSolution {
  double lambda = 1.0;
  double radius = 8.0;
  double mesh_width = 1e-2;  ///< outer spacing; [-1, 1] uses half of it
  std::string boundary_condition;
  std::vector<double> x, u, du, d2u;

  double weighted_sup_u = 0.0;  ///< max |u(x)| / (1 + |x|)
  double sup_du = 0.0;
  double sup_d2u = 0.0;
  double holder_exponent = 0.5;  ///< exponent used for the sampled seminorm of u''
  double holder_d2u = 0.0;       ///< sampled [u'']_{holder_exponent}, reported only
  double max_residual = 0.0;     ///< max interior |lambda u - a u''/2 - b u' - f|

  /// Cubic Hermite interpolation of u (from u, u') and u' (from u', u'').
  /// Throws InvalidArgument outside [-R, R].
  double value(double at) const;
  double derivative(double at) const;
};

struct SolverOptions {
  /// Dirichlet values at (-R, R); defaults to (f(-R)/lambda, f(R)/lambda).
  std::optional<std::pair<double, double>> boundary_values;
  /// Residual tolerance relative to max(1, max |f|).
  double relative_tolerance = 1e-6;
  double holder_exponent = 0.5;
};

/// General solver with separate advection b and right-hand side f. Mesh:
/// spacing h on [-R, -1] and [1, R], h/2 on [-1, 1]. Throws InvalidArgument on
/// violated preconditions (lambda > 0, R >= 8, h <= 1e-2, a > 0) and
/// SimulationError if the residual check fails.
ResolventSolution solve_elliptic(const ScalarFunction& advection, const ScalarFunction& rhs,
                                 const ScalarFunction& diffusion_a, double lambda, double radius,
                                 double h, const SolverOptions& options = {});

/// lambda u - (1/2) a u'' - b u' = b with a = sigma^2 and u(+-R) = b(+-R)/lambda.
/// Checks a(x) in [1/lambda_ell, lambda_ell] on the mesh.
ResolventSolution solve_resolvent(const DriftSpec& drift, const DiffusionSpec& diffusion,
                                  double lambda, double radius, double h);

struct NormSample {
  double lambda;
  double sup_du;
  double sup_d2u;
  double weighted_sup_u;
};

/// Solves for each lambda (increasing, >= 4 values spanning >= 3 decades).
std::vector<NormSample> norm_decay_sweep(const DriftSpec& drift, const DiffusionSpec& diffusion,
                                         std::span<const double> lambdas, double radius, double h);

/// Smallest lambda in the sweep from which sup |u'| decreases strictly to the
/// end of the sweep; nullopt if the last step does not decrease.
std::optional<double> empirical_lambda0(std::span<const NormSample> sweep);

struct ItoTanakaResidual {
  double value = 0.0;
  bool exited = false;  ///< path left [-R + 1, R - 1]; value is not meaningful
};

/// int b(X) ds - [u(x0) - u(X_T) + lambda int u(X) ds + sum u'(X) sigma(X) dB]
/// with every integral a left-endpoint sum on the path's eval grid.
ItoTanakaResidual ito_tanaka_residual(const ResolventSolution& solution, const EMPath& path,
                                      const DriftSpec& drift, const DiffusionSpec& diffusion);

struct ResidualCurve {
  StrongErrorCurve curve;   ///< L^2 norm of the residual per eval-grid n
  std::int64_t exited = 0;  ///< replicas discarded because a path left the domain
};

/// Residual L^2 norm for EM paths on n steps (eval grid = coarse grid), all
/// n coarsened from one path per replica at the largest n. Replicas whose
/// path exits at any n are discarded at every n.
ResidualCurve ito_tanaka_curve(const ProblemSpec& problem, const ResolventSolution& solution,
                               std::span<const std::int64_t> n_list, std::int64_t replicas,
                               std::uint64_t seed, const Execution& exec = {});

/// CSV with header x,u,du,d2u.
void write_solution_csv(const ResolventSolution& solution, std::ostream& out);

}  // namespace emrates::zvonkin
