// SPDX-License-Identifier: Apache-2.0
//
// dronedet: RSS-based drone detection in a Poisson field of interferers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace dronedet {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates the documented invariants of its type.
class InvalidParams : public Error {
 public:
  using Error::Error;
};

/// A density or special function was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Lévy quadrature was requested for an exponent other than b_I = 2.
class MethodMismatch : public Error {
 public:
  using Error::Error;
};

/// Threshold bracketing or an iterative solver failed to converge.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// Analytic and empirical ROC grids do not line up.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParams(what);
}

}  // namespace detail
}  // namespace dronedet
