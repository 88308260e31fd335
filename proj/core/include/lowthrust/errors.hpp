// Copyright 2026 The lowthrust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOWTHRUST_ERRORS_HPP_
#define LOWTHRUST_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lowthrust {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// State outside the domain of the equinoctial model (p <= 0, w <= 0, m <= 0).
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

// Argument outside a function's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// |B^T lambda| vanished; the optimal thrust direction is undefined.
class SingularDirectionError : public Error {
 public:
  using Error::Error;
};

// Integration failed: step budget exhausted or state left the valid domain.
class PropagationError : public Error {
 public:
  using Error::Error;
};

// Root finder / continuation did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lowthrust

#endif  // LOWTHRUST_ERRORS_HPP_
