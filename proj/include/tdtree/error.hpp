// Copyright 2026 The tdtree Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace tdtree {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A documented invariant or precondition of an input was violated.
class InvariantError : public Error {
  public:
    using Error::Error;
};

/// Operand shapes or qubit counts do not agree.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Requested size exceeds the supported qubit budget.
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// Malformed file contents (IDX, dataset CSV, tree or model files).
class FormatError : public Error {
  public:
    using Error::Error;
};

/// Experiment configuration could not be parsed or validated.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// A generator or learner could not satisfy its contract (e.g. quota unreachable,
/// boosting produced no usable member).
class RuntimeFailure : public Error {
  public:
    using Error::Error;
};

} // namespace tdtree
