// Copyright 2026 The qchange Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qchange {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: a precondition on a caller-supplied value does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A covariance matrix does not have the block pattern an operation needs.
class StructuralError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A covariance matrix violates the uncertainty principle.
class PhysicalityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical procedure failed (residue guard, non-convergence, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An infinite series could not be truncated within its term budget.
class TruncationError : public NumericError {
 public:
  TruncationError(const std::string& what, double achieved_bound)
      : NumericError(what), achieved_bound_(achieved_bound) {}

  double achieved_bound() const noexcept { return achieved_bound_; }

 private:
  double achieved_bound_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

}  // namespace detail
}  // namespace qchange
