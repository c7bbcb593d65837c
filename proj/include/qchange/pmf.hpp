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
#include <numeric>
#include <vector>

#include "qchange/entropy.hpp"
#include "qchange/errors.hpp"

namespace qchange {

inline constexpr double kPmfNormTolerance = 1e-9;

/// Probability mass function over outcomes 0..K plus the mass beyond K.
class DiscretePmf {
 public:
  DiscretePmf() = default;

  DiscretePmf(std::vector<double> probs, double tail_mass) : probs_(std::move(probs)), tail_mass_(tail_mass) {
    if (probs_.empty()) throw DomainError("DiscretePmf: at least one outcome is required");
    for (double p : probs_)
      if (!(p >= 0.0 && p <= 1.0 + kPmfNormTolerance)) throw DomainError("DiscretePmf: probability outside [0, 1]");
    if (!(tail_mass_ >= 0.0)) throw DomainError("DiscretePmf: tail_mass must be >= 0");
    const double total = mass() + tail_mass_;
    if (std::abs(total - 1.0) > kPmfNormTolerance)
      throw DomainError("DiscretePmf: probabilities do not sum to 1 (got " + std::to_string(total) + ")");
  }

  /// Builds a PMF from truncated probabilities, assigning 1 - sum to the tail.
  static DiscretePmf from_truncated(std::vector<double> probs) {
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    return DiscretePmf(std::move(probs), std::max(0.0, 1.0 - sum));
  }

  const std::vector<double>& probs() const { return probs_; }
  double tail_mass() const { return tail_mass_; }
  int cutoff() const { return static_cast<int>(probs_.size()) - 1; }
  double operator[](std::size_t k) const { return k < probs_.size() ? probs_[k] : 0.0; }
  double mass() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

  /// Copy with the tail folded into the last bin (mass-conserving).
  std::vector<double> folded() const {
    std::vector<double> out = probs_;
    out.back() += tail_mass_;
    return out;
  }

 private:
  std::vector<double> probs_;
  double tail_mass_ = 0.0;
};

/// Geometric (thermal photon-count) PMF with mean q, truncated once the tail
/// (q/(1+q))^{K+1} drops below tail_tolerance.
inline DiscretePmf thermal_pmf(double q, double tail_tolerance = 1e-12, int max_cutoff = 10'000'000) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("thermal_pmf: mean must be finite and >= 0");
  const double ratio = q / (1.0 + q);
  std::vector<double> probs;
  double p = 1.0 / (1.0 + q);
  double tail = ratio;  // P(X > k) after pushing outcome k
  probs.push_back(p);
  while (tail > tail_tolerance) {
    if (static_cast<int>(probs.size()) > max_cutoff) throw TruncationError("thermal_pmf: cutoff exceeded", tail);
    p *= ratio;
    probs.push_back(p);
    tail *= ratio;
  }
  return DiscretePmf(std::move(probs), tail);
}

/// Discrete relative entropy D(p1 || p0) = Σ p1 ln(p1/p0) over aligned outcomes.
///
/// The two tails are lumped into one extra outcome, so the value is the
/// relative entropy of the coarse-grained laws (a lower bound on the
/// untruncated one that converges as the tails vanish).
inline EntropyValue discrete_re(const DiscretePmf& p1, const DiscretePmf& p0) {
  const std::size_t n = std::min(p1.probs().size(), p0.probs().size());
  double sum = 0.0;
  auto term = [&](double a, double b) -> bool {
    if (a <= 0.0) return true;
    if (b <= 0.0) return false;
    sum += a * (std::log(a) - std::log(b));
    return true;
  };
  for (std::size_t k = 0; k < n; ++k)
    if (!term(p1[k], p0[k])) return EntropyValue::divergent();
  double t1 = p1.tail_mass();
  double t0 = p0.tail_mass();
  for (std::size_t k = n; k < p1.probs().size(); ++k) t1 += p1[k];
  for (std::size_t k = n; k < p0.probs().size(); ++k) t0 += p0[k];
  // a vanishing prechange tail against a ~1e-12 postchange tail is a truncation artefact
  if (!term(t1, t0) && t1 > 1e-10) return EntropyValue::divergent();
  return EntropyValue::finite(std::max(0.0, sum));
}

/// D(p1 || p0) where p0 is given by its log-probabilities; log_tail0 is the
/// log of the prechange mass beyond p1's cutoff. Avoids underflow when p0
/// decays much faster than p1.
template <class LogProb>
EntropyValue discrete_re_log(const DiscretePmf& p1, LogProb log_p0, double log_tail0) {
  double sum = 0.0;
  for (int k = 0; k <= p1.cutoff(); ++k) {
    const double a = p1[static_cast<std::size_t>(k)];
    if (a <= 0.0) continue;
    const double lb = log_p0(k);
    if (!std::isfinite(lb)) return EntropyValue::divergent();
    sum += a * (std::log(a) - lb);
  }
  const double t1 = p1.tail_mass();
  if (t1 > 0.0) {
    if (std::isfinite(log_tail0))
      sum += t1 * (std::log(t1) - log_tail0);
    else if (t1 > 1e-10)
      return EntropyValue::divergent();
  }
  return EntropyValue::finite(std::max(0.0, sum));
}

}  // namespace qchange
