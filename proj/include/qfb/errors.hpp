// Copyright 2026 The qfeedback Authors
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

namespace qfb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical or numerical parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A matrix or parametrized state violates a state invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The density matrix is not of the symmetric X form (a, b, e).
class NotSymXForm : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression was evaluated outside the range where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Bad user input at the command-line / configuration level.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Failure of a numerical routine (eigen-solver, integrator, convergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

class IntegrationDiverged : public NumericError {
 public:
  IntegrationDiverged(const std::string& what, double time)
      : NumericError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class SteadyStateTimeout : public NumericError {
 public:
  SteadyStateTimeout(const std::string& what, double residual)
      : NumericError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace qfb
