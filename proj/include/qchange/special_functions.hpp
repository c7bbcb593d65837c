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

#include <cmath>
#include <cstdint>
#include <vector>

#include "qchange/errors.hpp"

namespace qchange {

/// ln n! via lgamma.
inline double log_factorial(std::int64_t n) {
  if (n < 0) throw DomainError("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

/// Cached ln k! for k = 0..n.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(std::int64_t n = 0) { reserve(n); }

  void reserve(std::int64_t n) {
    for (auto k = static_cast<std::int64_t>(table_.size()); k <= n; ++k) table_.push_back(log_factorial(k));
  }

  double operator()(std::int64_t k) {
    if (k >= static_cast<std::int64_t>(table_.size())) reserve(k);
    return table_[static_cast<std::size_t>(k)];
  }

 private:
  std::vector<double> table_;
};

/// Associated Laguerre polynomial L_l^{(a)}(x), by the three-term recurrence
/// (k+1) L_{k+1} = (2k+1+a-x) L_k - (k+a) L_{k-1}.
inline double assoc_laguerre(int l, double a, double x) {
  if (l < 0) throw DomainError("assoc_laguerre: degree must be >= 0");
  double prev = 1.0;
  if (l == 0) return prev;
  double curr = 1.0 + a - x;
  for (int k = 1; k < l; ++k) {
    const double next = ((2.0 * k + 1.0 + a - x) * curr - (k + a) * prev) / (k + 1.0);
    prev = curr;
    curr = next;
  }
  return curr;
}

/// Terminating Gauss hypergeometric series 2F1(a, b; c; z), where a or b is a
/// nonpositive integer. The sum stops at the first vanishing numerator factor.
inline double hyp2f1_terminating(double a, double b, double c, double z) {
  auto nonpositive_integer = [](double v) { return v <= 0.0 && v == std::floor(v); };
  if (!nonpositive_integer(a) && !nonpositive_integer(b))
    throw DomainError("hyp2f1_terminating: a or b must be a nonpositive integer");
  double terms = 0.0;
  if (nonpositive_integer(a)) terms = -a;
  if (nonpositive_integer(b)) terms = nonpositive_integer(a) ? std::min(-a, -b) : -b;
  double sum = 1.0;
  double term = 1.0;
  for (int j = 0; j < static_cast<int>(terms); ++j) {
    if (c + j == 0.0) throw DomainError("hyp2f1_terminating: zero denominator before termination");
    term *= (a + j) * (b + j) / ((c + j) * (j + 1.0)) * z;
    sum += term;
  }
  return sum;
}

}  // namespace qchange
