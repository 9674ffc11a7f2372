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

#include <stdexcept>
#include <string>

namespace emrates {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Numerical failure while simulating or solving (non-finite state, singular
/// diffusion, failed residual check).
class SimulationError : public Error {
 public:
  using Error::Error;
};

/// The diffusion matrix was found numerically singular.
class EllipticityError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// Malformed or invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace emrates
