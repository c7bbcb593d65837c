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
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "qchange/entropy.hpp"
#include "qchange/errors.hpp"
#include "qchange/gaussian_state.hpp"
#include "qchange/pmf.hpp"
#include "qchange/special_functions.hpp"

namespace qchange {

inline constexpr double kPmfTailTolerance = 1e-12;
inline constexpr int kMaxSeriesTerms = 100'000;

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln of the geometric weight q^k / (1+q)^{k+1}
inline double log_geometric(double q, std::int64_t k) {
  if (k == 0) return -std::log1p(q);
  if (q == 0.0) return kNegInf;
  return k * std::log(q) - (k + 1.0) * std::log1p(q);
}

// ln|L_n^{(a)}(x)| with rescaling so large degrees do not overflow
inline double log_abs_laguerre(int n, double a, double x) {
  double prev = 1.0;
  if (n == 0) return 0.0;
  double curr = 1.0 + a - x;
  double scale = 0.0;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + a - x) * curr - (k + a) * prev) / (k + 1.0);
    prev = curr;
    curr = next;
    if (std::abs(curr) > 1e150) {
      prev *= 1e-150;
      curr *= 1e-150;
      scale += 150.0 * std::log(10.0);
    }
  }
  return curr == 0.0 ? kNegInf : std::log(std::abs(curr)) + scale;
}

// Extends probs until the missing mass falls below tolerance.
template <class Prob>
DiscretePmf grow_pmf(Prob prob, std::optional<int> cutoff, double tail_tolerance, const char* what) {
  std::vector<double> probs;
  double sum = 0.0;
  if (cutoff) {
    detail::require(*cutoff >= 1, std::string(what) + ": cutoff must be >= 1");
    for (int k = 0; k <= *cutoff; ++k) {
      probs.push_back(prob(k));
      sum += probs.back();
    }
    return DiscretePmf(std::move(probs), std::max(0.0, 1.0 - sum));
  }
  while (probs.size() < 2 || 1.0 - sum >= tail_tolerance) {
    if (static_cast<int>(probs.size()) > kMaxSeriesTerms)
      throw TruncationError(std::string(what) + ": PMF did not reach its tail bound", 1.0 - sum);
    probs.push_back(prob(static_cast<int>(probs.size())));
    sum += probs.back();
  }
  return DiscretePmf(std::move(probs), std::max(0.0, 1.0 - sum));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kennedy receiver: null the coherent probe with the prechange displacement, count photons.

/// Photon-count PMF behind the Kennedy displacement in phase s.
inline DiscretePmf kennedy_pmf(const ChangeScenario& scenario, int s, std::optional<int> cutoff = std::nullopt,
                               double tail_tolerance = kPmfTailTolerance) {
  scenario.validate();
  const double noise = scenario.n_bar_B * (1.0 - scenario.eta(s));
  const double alpha2 =
      s == 0 ? 0.0 : scenario.n_bar * std::pow(std::sqrt(scenario.eta0) - std::sqrt(scenario.eta1), 2);
  if (alpha2 == 0.0)
    return detail::grow_pmf([&](int k) { return std::exp(detail::log_geometric(noise, k)); }, cutoff,
                            tail_tolerance, "kennedy_pmf");
  const double log_alpha2 = std::log(alpha2);
  const double ratio = noise / (1.0 + noise);
  LogFactorialTable lf;
  auto prob = [&](int k) {
    double acc = 0.0;
    double tail = 1.0;  // P(L > l - 1) for the thermal weights
    for (int l = 0;; ++l) {
      if (l > kMaxSeriesTerms) throw TruncationError("kennedy_pmf: inner sum did not converge", tail);
      const double lth = detail::log_geometric(noise, l);
      if (lth == detail::kNegInf) break;
      const int lo = std::min(k, l);
      const int d = std::abs(k - l);
      const double ll = detail::log_abs_laguerre(lo, d, alpha2);
      if (ll != detail::kNegInf) acc += std::exp(lth - alpha2 + lf(lo) - lf(lo + d) + d * log_alpha2 + 2.0 * ll);
      tail *= ratio;
      if (tail < 1e-15 * acc || tail < 1e-300) break;
    }
    return acc;
  };
  return detail::grow_pmf(prob, cutoff, tail_tolerance, "kennedy_pmf");
}

inline EntropyValue re_kennedy(const ChangeScenario& scenario) {
  const DiscretePmf post = kennedy_pmf(scenario, 1);
  const double noise0 = scenario.n_bar_B * (1.0 - scenario.eta0);
  const double log_ratio = noise0 > 0.0 ? std::log(noise0 / (1.0 + noise0)) : detail::kNegInf;
  return discrete_re_log(
      post, [&](int k) { return detail::log_geometric(noise0, k); }, (post.cutoff() + 1.0) * log_ratio);
}

// ---------------------------------------------------------------------------
// TMSV probe, matched inverse squeezer, photon counting on both modes.

namespace detail {

struct TwoPnrSetup {
  TwoModeStandardForm pre;
  TwoModeStandardForm post;
  double tau1 = 0.0;  // tanh(r1 - r0)
  double tau2 = 1.0;  // cosh(r1 - r0)
};

inline TwoPnrSetup two_pnr_setup(const ChangeScenario& scenario) {
  scenario.validate();
  TwoPnrSetup setup;
  setup.pre = tmsv_output_standard_form(scenario.n_bar, scenario.eta0, scenario.n_bar_B);
  setup.post = tmsv_output_standard_form(scenario.n_bar, scenario.eta1, scenario.n_bar_B);
  const double dr = std::asinh(setup.pre.nu) - std::asinh(setup.post.nu);  // r_s = -asinh ν_s
  setup.tau1 = std::tanh(dr);
  setup.tau2 = std::cosh(dr);
  return setup;
}

inline constexpr long double kCancellationLimit = 1e10L;

inline double log_zeta(const TwoModeStandardForm& f, std::int64_t k, std::int64_t l) {
  return log_geometric(f.n_t1, k) + log_geometric(f.n_t2, l);
}

inline double two_pnr_post(const TwoPnrSetup& setup, int k, int l, int trunc, LogFactorialTable& lf) {
  const auto& f = setup.post;
  if (setup.tau1 == 0.0) return std::exp(log_zeta(f, k, l));
  const double log_t1 = std::log(std::abs(setup.tau1));
  const double log_t2 = std::log(setup.tau2);
  const double sinh2 = setup.tau1 * setup.tau1 * setup.tau2 * setup.tau2;
  const double rho = f.n_t1 * f.n_t2 / ((1.0 + f.n_t1) * (1.0 + f.n_t2));
  const int s_min = std::max(k - l, 0);
  double acc = 0.0;
  for (int s = s_min;; ++s) {
    const int s2 = s - k + l;
    if (s - s_min >= trunc) {
      const double bound = std::exp(log_zeta(f, s, s2)) / (1.0 - rho);
      throw TruncationError("two_pnr_pmf: outer sum did not converge", bound);
    }
    const double lz = log_zeta(f, s, s2);
    if (lz == kNegInf) break;
    // inner u-sum relative to its first term; consecutive terms differ by a rational factor
    const int u_lo = std::max(0, k - s);
    const int u_hi = std::min(k, l);
    const double lg0 = 0.5 * (lf(s) + lf(s2) + lf(k) + lf(l)) + (2.0 * u_lo + s - k) * log_t1 -
                       (k + l - 2.0 * u_lo + 1.0) * log_t2 - (lf(s - k + u_lo) + lf(u_lo) + lf(k - u_lo) + lf(l - u_lo));
    long double term = 1.0L, inner = 1.0L, largest = 1.0L;
    for (int u = u_lo; u < u_hi; ++u) {
      term *= -sinh2 * (k - u) * (l - u) / ((s - k + u + 1.0) * (u + 1.0));
      inner += term;
      largest = std::max(largest, std::abs(term));
    }
    if (std::abs(inner) * kCancellationLimit < largest)
      throw NumericError("two_pnr_pmf: cancellation in the inner sum exceeds working precision");
    if (inner != 0.0L) acc += std::exp(lz + 2.0 * lg0 + 2.0 * std::log(std::abs(static_cast<double>(inner))));
    const double bound = std::exp(log_zeta(f, s + 1, s2 + 1)) / (1.0 - rho);
    if (bound < 1e-14 * acc || bound < 1e-300) break;
  }
  return acc;
}

}  // namespace detail

/// Joint count probability p(k, l) in phase s (0: prechange, 1: postchange).
inline double two_pnr_prob(const ChangeScenario& scenario, int s, int k, int l, int trunc = kMaxSeriesTerms) {
  detail::require(k >= 0 && l >= 0, "two_pnr_pmf: counts must be >= 0");
  detail::require(trunc >= 1, "two_pnr_pmf: trunc must be >= 1");
  const auto setup = detail::two_pnr_setup(scenario);
  if (s == 0) return std::exp(detail::log_zeta(setup.pre, k, l));
  LogFactorialTable lf;
  return detail::two_pnr_post(setup, k, l, trunc, lf);
}

/// Postchange joint count probability.
inline double two_pnr_pmf(const ChangeScenario& scenario, int k, int l, int trunc = kMaxSeriesTerms) {
  return two_pnr_prob(scenario, 1, k, l, trunc);
}

/// Both joint PMFs on a common grid sized from the postchange marginals.
struct TwoPnrGrid {
  int k_max = 0;
  int l_max = 0;
  std::vector<double> post;  // row-major, (k_max+1) x (l_max+1)
  std::vector<double> pre;
  double post_tail = 0.0;    // 1 - grid mass
  double pre_tail = 0.0;

  double post_at(int k, int l) const { return post[static_cast<std::size_t>(k) * (l_max + 1) + l]; }
  double pre_at(int k, int l) const { return pre[static_cast<std::size_t>(k) * (l_max + 1) + l]; }
};

/// Joint counts follow from the generating function
/// 1 / (a0 - a1 z1 - a2 z2 + a12 z1 z2), giving a positive-weight recurrence
/// over the grid instead of the alternating sum of two_pnr_pmf.
inline TwoPnrGrid two_pnr_grid(const ChangeScenario& scenario, double tail_tolerance = kPmfTailTolerance) {
  const auto setup = detail::two_pnr_setup(scenario);
  const auto& f = setup.post;
  const double nu0 = setup.pre.nu;
  const double residual = f.nu * std::sqrt(1.0 + nu0 * nu0) - nu0 * std::sqrt(1.0 + f.nu * f.nu);
  const double total = f.n_t1 + f.n_t2 + 1.0;
  const double spread = residual * residual * total;
  auto extent = [&](double q) {
    if (q <= 0.0) return 0;
    const double k = std::log(0.5 * tail_tolerance) / std::log(q / (1.0 + q));
    if (k > kMaxSeriesTerms) throw TruncationError("two_pnr_grid: marginal cutoff too large", q);
    return static_cast<int>(std::ceil(k));
  };
  TwoPnrGrid grid;
  grid.k_max = std::max(1, extent(f.n_t1 + spread));
  grid.l_max = std::max(1, extent(f.n_t2 + spread));
  const int width = grid.l_max + 1;
  const std::size_t cells = static_cast<std::size_t>(grid.k_max + 1) * width;
  grid.post.assign(cells, 0.0);
  grid.pre.assign(cells, 0.0);
  const double a0 = (1.0 + f.n_t1) * (1.0 + f.n_t2) + spread;
  const double a1 = f.n_t1 * (1.0 + f.n_t2) / a0;
  const double a2 = f.n_t2 * (1.0 + f.n_t1) / a0;
  const double a12 = (f.n_t1 * f.n_t2 - spread) / a0;
  double post_mass = 0.0, pre_mass = 0.0;
  for (int k = 0; k <= grid.k_max; ++k) {
    for (int l = 0; l <= grid.l_max; ++l) {
      const std::size_t i = static_cast<std::size_t>(k) * width + l;
      double p = (k == 0 && l == 0) ? 1.0 / a0 : 0.0;
      if (k > 0) p += a1 * grid.post[i - width];
      if (l > 0) p += a2 * grid.post[i - 1];
      if (k > 0 && l > 0) p -= a12 * grid.post[i - width - 1];
      grid.post[i] = std::max(0.0, p);
      grid.pre[i] = std::exp(detail::log_zeta(setup.pre, k, l));
      post_mass += grid.post[i];
      pre_mass += grid.pre[i];
    }
  }
  grid.post_tail = std::max(0.0, 1.0 - post_mass);
  grid.pre_tail = std::max(0.0, 1.0 - pre_mass);
  return grid;
}

struct TwoPnrEntropy {
  EntropyValue value;
  double truncated_mass = 0.0;  // postchange mass outside the grid
};

inline TwoPnrEntropy re_two_pnr(const ChangeScenario& scenario) {
  const TwoPnrGrid grid = two_pnr_grid(scenario);
  const auto pre = tmsv_output_standard_form(scenario.n_bar, scenario.eta0, scenario.n_bar_B);
  const int width = grid.l_max + 1;
  // ln P(K > k_max or L > l_max) under the product of geometrics
  auto log_beyond = [](double q, int cut) {
    return q > 0.0 ? (cut + 1.0) * std::log(q / (1.0 + q)) : detail::kNegInf;
  };
  const double la = log_beyond(pre.n_t1, grid.k_max);
  const double lb = log_beyond(pre.n_t2, grid.l_max) + std::log1p(-std::exp(la));
  const double hi = std::max(la, lb);
  const double log_tail0 = hi == detail::kNegInf ? hi : hi + std::log1p(std::exp(std::min(la, lb) - hi));
  std::vector<double> p1 = grid.post;
  const DiscretePmf post(std::move(p1), grid.post_tail);
  const auto value = discrete_re_log(
      post, [&](int i) { return detail::log_zeta(pre, i / width, i % width); }, log_tail0);
  return {value, grid.post_tail};
}

// ---------------------------------------------------------------------------
// Fock probe with photon counting.

/// Output photon-count probability of the Fock state |n⟩ through the lossy thermal channel.
inline double fock_pmf(int x, int n_fock, double eta, double n_bar_B) {
  detail::require(x >= 0 && n_fock >= 0, "fock_pmf: counts must be >= 0");
  detail::require(std::isfinite(eta) && std::isfinite(n_bar_B), "fock_pmf: non-finite parameter");
  if (eta <= 0.0 || eta >= 1.0 || n_bar_B <= 0.0)
    throw DomainError("fock_pmf: singular parameters (eta in {0, 1} or n_bar_B = 0); use the pure-loss or "
                      "identity-channel limit forms");
  const double nb = n_bar_B;
  const double z = (nb - eta * (1.0 + nb)) * (1.0 + (1.0 - eta) * nb) / ((1.0 - eta) * (1.0 - eta) * nb * (1.0 + nb));
  const double lpref = log_factorial(x + n_fock) - log_factorial(x) - log_factorial(n_fock) +
                       (x + n_fock) * std::log1p(-eta) + n_fock * std::log1p(nb) + x * std::log(nb) -
                       (x + n_fock + 1.0) * std::log1p(nb * (1.0 - eta));
  // terminating 2F1(-x, -n; -(x+n); z), summed in the log domain
  const int terms = std::min(x, n_fock);
  std::vector<double> logs{0.0};
  std::vector<int> signs{1};
  const double a = -x, b = -n_fock, c = -(x + n_fock);
  double log_abs_z = z == 0.0 ? detail::kNegInf : std::log(std::abs(z));
  for (int j = 0; j < terms; ++j) {
    const double ratio = (a + j) * (b + j) / ((c + j) * (j + 1.0));
    logs.push_back(logs.back() + std::log(std::abs(ratio)) + log_abs_z);
    signs.push_back(signs.back() * (ratio < 0.0 ? -1 : 1) * (z < 0.0 ? -1 : 1));
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < logs.size(); ++j) sum += signs[j] * std::exp(logs[j] - top);
  if (sum < 0.0) {
    if (sum < -1e-12) throw NumericError("fock_pmf: cancellation produced a negative probability");
    return 0.0;
  }
  return sum == 0.0 ? 0.0 : std::exp(lpref + top + std::log(sum));
}

/// Output count PMF of |n⟩, extended until the missing mass is below tail_tolerance.
inline DiscretePmf fock_output_pmf(int n_fock, double eta, double n_bar_B, double tail_tolerance = kPmfTailTolerance) {
  return detail::grow_pmf([&](int x) { return fock_pmf(x, n_fock, eta, n_bar_B); }, std::nullopt, tail_tolerance,
                          "fock_output_pmf");
}

inline bool is_fock_photon_number(double n_bar) {
  return n_bar >= 0.0 && n_bar == std::floor(n_bar) && n_bar <= kMaxSeriesTerms;
}

inline EntropyValue re_fock_pnr(const ChangeScenario& scenario) {
  scenario.validate();
  if (!is_fock_photon_number(scenario.n_bar)) throw DomainError("re_fock_pnr: n_bar must be a nonnegative integer");
  const int n = static_cast<int>(scenario.n_bar);
  return discrete_re(fock_output_pmf(n, scenario.eta1, scenario.n_bar_B),
                     fock_output_pmf(n, scenario.eta0, scenario.n_bar_B));
}

}  // namespace qchange
