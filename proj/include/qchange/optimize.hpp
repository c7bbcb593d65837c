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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "qchange/errors.hpp"

namespace qchange {

struct Maximum {
  double argmax = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi],
/// stopping once the bracket is narrower than tolerance.
inline Maximum golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                       double tolerance) {
  if (!(hi >= lo)) throw DomainError("golden_section_maximize: empty interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Maximum best{0.5 * (a + b), f(0.5 * (a + b))};
  // keep the bracket ends in play: the maximum may sit on the boundary
  for (double x : {lo, hi}) {
    if (x < a || x > b) continue;
    const double fx = f(x);
    if (fx > best.value) best = {x, fx};
  }
  return best;
}

/// Uniform grid scan followed by golden-section refinement around the best
/// grid point; robust to mild multimodality at grid resolution.
inline Maximum grid_golden_maximize(const std::function<double(double)>& f, double lo, double hi, int grid_points,
                                    double tolerance) {
  if (grid_points < 2) throw DomainError("grid_golden_maximize: need at least two grid points");
  if (hi <= lo) return {lo, f(lo)};
  const double h = (hi - lo) / (grid_points - 1);
  Maximum best;
  int best_index = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double x = lo + i * h;
    const double fx = f(x);
    if (fx > best.value) {
      best = {x, fx};
      best_index = i;
    }
  }
  const double a = lo + std::max(0, best_index - 1) * h;
  const double b = lo + std::min(grid_points - 1, best_index + 1) * h;
  const Maximum refined = golden_section_maximize(f, a, b, tolerance);
  return refined.value > best.value ? refined : best;
}

}  // namespace qchange
