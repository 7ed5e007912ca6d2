// Copyright 2026 The eitecho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EITECHO_ERROR_HPP
#define EITECHO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace eitecho {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a type invariant (non-Hermitian matrix, negative rate, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A run was configured in a way that cannot be executed faithfully,
/// e.g. an integration step that is too coarse or a sequence too short.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed (fit divergence, degenerate data, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace eitecho

#endif  // EITECHO_ERROR_HPP
