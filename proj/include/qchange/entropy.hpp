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
#include <limits>

namespace qchange {

/// A relative entropy in nats, or the tagged +infinity sentinel when the
/// post-change law is not absolutely continuous w.r.t. the prechange law.
struct EntropyValue {
  double value = 0.0;
  bool diverged = false;

  static EntropyValue finite(double v) { return {v, false}; }
  static EntropyValue divergent() { return {std::numeric_limits<double>::infinity(), true}; }

  bool is_finite() const { return !diverged; }
};

/// Relative entropy results returned by the QRE routines.
using QreResult = EntropyValue;

namespace detail {

// x ln x with the 0 ln 0 = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace detail

/// Von Neumann entropy of a thermal state: g(x) = (1+x)ln(1+x) - x ln x.
inline double thermal_entropy(double x) {
  if (x <= 0.0) return 0.0;
  return (1.0 + x) * std::log1p(x) - x * std::log(x);
}

}  // namespace qchange
