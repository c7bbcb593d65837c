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

// Quantum relative entropy D(σ1 || σ0) between Gaussian states, closed forms
// for TMSV and coherent probes, and their low-noise / high-energy asymptotics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "qchange/entropy.hpp"
#include "qchange/errors.hpp"
#include "qchange/gaussian_state.hpp"

namespace qchange {

inline constexpr double kImaginaryResidueTolerance = 1e-9;
// |2ν - 1| below this marks a pure symplectic mode (arccoth branch point).
inline constexpr double kPureModeTolerance = 1e-9;
inline constexpr double kNegativeQreTolerance = 1e-9;

/// Prechange and postchange outputs of the channel acting on mode 0 of `input`.
struct OutputPair {
  GaussianState pre;
  GaussianState post;
};

inline OutputPair channel_outputs(const GaussianState& input, const ChangeScenario& scenario) {
  scenario.validate();
  return {apply_lossy_thermal(input, 0, scenario.eta0, scenario.n_bar_B),
          apply_lossy_thermal(input, 0, scenario.eta1, scenario.n_bar_B)};
}

/// Von Neumann entropy Σ_k g(ν_k - 1/2) of a Gaussian state.
inline double von_neumann_entropy(const GaussianState& state) {
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(state.cov())) s += thermal_entropy(std::max(0.0, nu - 0.5));
  return s;
}

namespace detail {

// Evaluates ln Z0 + tr(G0 Σ1) + γ G0 γᵀ with G0 = 2iΩ arccoth(2iΣ0Ω).
//
// arccoth is applied on the spectrum ±ν_k of iΣ0Ω. With n = ν - 1/2 the
// contribution of eigenvector j (sign s_j, weight T_j = u_j† Σ0^{-1/2} M 2iΩ
// Σ0^{1/2} u_j, M = Σ1 + γγᵀ) is ½ln n (1 - s_j T_j) + ½ln(1+n)(1 + s_j T_j).
// Pure modes (n -> 0) are collected separately: their limit is finite (zero)
// iff σ1 puts no excitation in them, otherwise the entropy diverges.
struct CrossTerm {
  double value = 0.0;
  bool diverged = false;
};

inline CrossTerm cross_log_term(const GaussianState& state0, const Matrix& second_moment) {
  const int m = state0.mode_count();
  const auto spectrum = symplectic_spectrum(state0.cov());
  const Matrix omega = symplectic_form(m);
  const std::complex<double> two_i(0.0, 2.0);
  const ComplexMatrix b = (spectrum.roots.inverse_root * second_moment).cast<std::complex<double>>() * two_i *
                          (omega * spectrum.roots.root).cast<std::complex<double>>();

  std::complex<double> total = 0.0;
  double magnitude = 0.0;
  std::complex<double> pure_occupancy = 0.0;
  for (int j = 0; j < 2 * m; ++j) {
    const double lambda = spectrum.eigenvalues(j);
    const double sign = lambda > 0.0 ? 1.0 : -1.0;
    const auto u = spectrum.eigenvectors.col(j);
    const std::complex<double> weight = sign * u.dot(b * u);  // dot() conjugates its first argument
    const double n = std::abs(lambda) - 0.5;
    if (2.0 * std::abs(lambda) - 1.0 < kPureModeTolerance) {
      pure_occupancy += 0.25 * (weight - 1.0);
      continue;
    }
    const std::complex<double> c = 0.5 * std::log(n) * (1.0 - weight) + 0.5 * std::log1p(n) * (1.0 + weight);
    total += c;
    magnitude += std::abs(c);
  }
  if (std::abs(total.imag()) > kImaginaryResidueTolerance * std::max(1.0, magnitude))
    throw NumericError("gaussian_qre: imaginary residue above tolerance; convention mismatch");
  if (pure_occupancy.real() > kPureModeTolerance) return {std::numeric_limits<double>::infinity(), true};
  return {total.real(), false};
}

}  // namespace detail

/// Quantum relative entropy D(state1 || state0) in nats.
inline QreResult gaussian_qre(const GaussianState& state1, const GaussianState& state0) {
  if (state1.mode_count() != state0.mode_count()) throw DomainError("gaussian_qre: mode counts differ");
  if (state1.mean() == state0.mean() && state1.cov() == state0.cov()) return EntropyValue::finite(0.0);
  const Vector gamma = state1.mean() - state0.mean();
  const Matrix second_moment = state1.cov() + gamma * gamma.transpose();
  const auto cross = detail::cross_log_term(state0, second_moment);
  if (cross.diverged) return EntropyValue::divergent();
  const double entropy1 = von_neumann_entropy(state1);
  const double d = 0.5 * cross.value - entropy1;
  if (d < -kNegativeQreTolerance * std::max(1.0, entropy1))
    throw NumericError("gaussian_qre: negative relative entropy " + std::to_string(d));
  return EntropyValue::finite(std::max(0.0, d));
}

namespace detail {

// x ln(1 + 1/y), returning false when the term diverges.
inline bool occupancy_log_term(double x, double y, double& acc) {
  if (x <= 0.0) return true;
  if (y <= 0.0) return false;
  acc += x * std::log1p(1.0 / y);
  return true;
}

}  // namespace detail

/// Closed-form QRE between the TMSV outputs at η1 and η0.
inline QreResult qre_tmsv(const ChangeScenario& scenario) {
  scenario.validate();
  if (scenario.eta0 == scenario.eta1) return EntropyValue::finite(0.0);
  const auto f0 = tmsv_output_standard_form(scenario.n_bar, scenario.eta0, scenario.n_bar_B);
  const auto f1 = tmsv_output_standard_form(scenario.n_bar, scenario.eta1, scenario.n_bar_B);
  const double c0 = std::sqrt(1.0 + f0.nu * f0.nu);
  const double c1 = std::sqrt(1.0 + f1.nu * f1.nu);
  const double b = std::pow(f1.nu * c0 - f0.nu * c1, 2);
  const double c = std::pow(f0.nu * f1.nu - c1 * c0, 2);
  const double x1 = b * (1.0 + f1.n_t2) + c * f1.n_t1;
  const double x2 = b * (1.0 + f1.n_t1) + c * f1.n_t2;
  double d = 0.0;
  if (!detail::occupancy_log_term(x1, f0.n_t1, d) || !detail::occupancy_log_term(x2, f0.n_t2, d))
    return EntropyValue::divergent();
  d += std::log1p(f0.n_t1) + std::log1p(f0.n_t2) - thermal_entropy(f1.n_t1) - thermal_entropy(f1.n_t2);
  return EntropyValue::finite(std::max(0.0, d));
}

/// Closed-form QRE between the coherent-state outputs at η1 and η0.
inline QreResult qre_coherent(const ChangeScenario& scenario) {
  scenario.validate();
  if (scenario.eta0 == scenario.eta1) return EntropyValue::finite(0.0);
  const double n0 = scenario.n_bar_B * (1.0 - scenario.eta0);
  const double n1 = scenario.n_bar_B * (1.0 - scenario.eta1);
  const double shift = scenario.n_bar * std::pow(std::sqrt(scenario.eta0) - std::sqrt(scenario.eta1), 2);
  double d = 0.0;
  if (!detail::occupancy_log_term(n1 + shift, n0, d)) return EntropyValue::divergent();
  d += std::log1p(n0) - thermal_entropy(n1);
  return EntropyValue::finite(std::max(0.0, d));
}

/// Coefficients of -ln n̄_B in D_coh and D_TMSV as n̄_B -> 0.
struct ScalingCoefficients {
  double coh_coeff = 0.0;
  double tmsv_coeff = 0.0;
  double ratio = 1.0;  // tmsv_coeff / coh_coeff
};

inline ScalingCoefficients lownoise_coefficients(double n_bar, double eta0, double eta1) {
  detail::require(n_bar >= 0.0 && std::isfinite(n_bar), "lownoise_coefficients: n_bar must be >= 0");
  detail::require(0.0 <= eta1 && eta1 < eta0 && eta0 <= 1.0, "lownoise_coefficients: need 0 <= eta1 < eta0 <= 1");
  const double gap = std::pow(std::sqrt(eta0) - std::sqrt(eta1), 2);
  const double ratio = (1.0 + n_bar) / (1.0 + n_bar * (1.0 - eta0));
  return {n_bar * gap, n_bar * gap * ratio, ratio};
}

/// lim_{n̄→∞} D_TMSV / n̄ (also the limit of the TMS+PNR receiver).
inline double tmsv_linear_coefficient(double n_bar_B, double eta0, double eta1) {
  detail::require(n_bar_B > 0.0 && std::isfinite(n_bar_B), "tmsv_linear_coefficient: n_bar_B must be > 0");
  detail::require(0.0 <= eta0 && eta0 < 1.0, "tmsv_linear_coefficient: eta0 must lie in [0, 1)");
  detail::require(0.0 <= eta1 && eta1 <= 1.0, "tmsv_linear_coefficient: eta1 must lie in [0, 1]");
  return std::pow(std::sqrt(eta1) - std::sqrt(eta0), 2) / (1.0 - eta0) * std::log1p(1.0 / n_bar_B);
}

/// QRE of the channel outputs for a displaced TMSV with squeezing fraction κ.
inline QreResult displaced_tmsv_qre(const ChangeScenario& scenario, double kappa) {
  const auto outputs = channel_outputs(make_displaced_tmsv(scenario.n_bar, kappa), scenario);
  return gaussian_qre(outputs.post, outputs.pre);
}

struct KappaPoint {
  double kappa = 0.0;
  QreResult qre;
  double normalized = 0.0;  // (D - min) / (max - min) over the grid
  double derivative = 0.0;  // central difference, κ clamped to [h, 1 - h]
};

struct KappaSweep {
  std::vector<KappaPoint> points;
  bool diverged = false;
};

inline constexpr double kKappaStep = 1e-5;

inline KappaSweep kappa_qre_sweep(const ChangeScenario& scenario, const std::vector<double>& grid,
                                  double step = kKappaStep) {
  scenario.validate();
  for (double k : grid) detail::require(k >= 0.0 && k <= 1.0, "kappa_qre_sweep: grid must lie in [0, 1]");
  KappaSweep sweep;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double kappa : grid) {
    KappaPoint point;
    point.kappa = kappa;
    point.qre = displaced_tmsv_qre(scenario, kappa);
    const double center = std::clamp(kappa, step, 1.0 - step);
    const auto up = displaced_tmsv_qre(scenario, center + step);
    const auto down = displaced_tmsv_qre(scenario, center - step);
    if (point.qre.diverged || up.diverged || down.diverged) {
      sweep.diverged = true;
      point.derivative = std::numeric_limits<double>::quiet_NaN();
    } else {
      point.derivative = (up.value - down.value) / (2.0 * step);
      lo = std::min(lo, point.qre.value);
      hi = std::max(hi, point.qre.value);
    }
    sweep.points.push_back(point);
  }
  for (auto& point : sweep.points) {
    if (sweep.diverged)
      point.normalized = std::numeric_limits<double>::quiet_NaN();
    else
      point.normalized = hi > lo ? (point.qre.value - lo) / (hi - lo) : 0.0;
  }
  return sweep;
}

}  // namespace qchange
