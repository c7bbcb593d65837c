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

#include <Eigen/Cholesky>
#include <cmath>
#include <optional>

#include "qchange/entropy.hpp"
#include "qchange/errors.hpp"
#include "qchange/gaussian_state.hpp"
#include "qchange/optimize.hpp"
#include "qchange/pmf.hpp"

namespace qchange {

/// Scalar Gaussian law of a homodyne record, variance in units where vacuum is 1/4.
struct GaussianChannelLaw {
  double mean = 0.0;
  double variance = 0.25;

  void validate() const {
    if (!(std::isfinite(mean) && std::isfinite(variance) && variance > 0.0))
      throw DomainError("GaussianChannelLaw: variance must be finite and > 0");
  }
};

/// D(N(μ1, v1) || N(μ0, v0)).
inline double gaussian_kl(const GaussianChannelLaw& post, const GaussianChannelLaw& pre) {
  post.validate();
  pre.validate();
  const double d = (post.variance - pre.variance) / pre.variance;
  const double shift = post.mean - pre.mean;
  return std::max(0.0, 0.5 * (d - std::log1p(d) + shift * shift / pre.variance));
}

/// Homodyne law of the coherent probe |√n̄⟩ after the channel in phase s.
inline GaussianChannelLaw coherent_homodyne_law(const ChangeScenario& scenario, int s) {
  scenario.validate();
  const double eta = scenario.eta(s);
  return {std::sqrt(eta * scenario.n_bar), (1.0 + 2.0 * scenario.n_bar_B * (1.0 - eta)) / 4.0};
}

inline double re_coherent_homodyne(const ChangeScenario& scenario) {
  scenario.validate();
  const double n0 = scenario.n_bar_B * (1.0 - scenario.eta0);
  const double n1 = scenario.n_bar_B * (1.0 - scenario.eta1);
  const double shift = std::pow(std::sqrt(scenario.eta0) - std::sqrt(scenario.eta1), 2);
  const double d = 2.0 * (n1 - n0) / (1.0 + 2.0 * n0);
  return std::max(0.0, 2.0 * scenario.n_bar * shift / (1.0 + 2.0 * n0) + 0.5 * (d - std::log1p(d)));
}

// ---------------------------------------------------------------------------
// Entanglement-assisted coherent probe read out through a Green-machine unitary.

/// Joint law of the m homodyne records of one codeword block.
struct EaCoherentLaw {
  int m = 1;
  Vector mean_vec;
  Matrix cov;

  void validate() const {
    if (m < 1 || mean_vec.size() != m || cov.rows() != m || cov.cols() != m)
      throw DomainError("EaCoherentLaw: dimensions do not match m");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * detail::scale_of(cov))
      throw DomainError("EaCoherentLaw: covariance is not symmetric");
    if ((mean_vec.array() - mean_vec(0)).abs().maxCoeff() > kSymmetryTolerance * (1.0 + std::abs(mean_vec(0))))
      throw DomainError("EaCoherentLaw: mean vector is not constant");
  }
};

/// sinh r of the shared squeezer fixed by α_r² + sinh²r / m = n̄.
inline double ea_squeezing(int m, double alpha_r, double n_bar) {
  detail::require(m >= 1, "EA block length m must be >= 1");
  detail::require(std::isfinite(alpha_r) && alpha_r >= 0.0, "alpha_r must be >= 0");
  const double excess = n_bar - alpha_r * alpha_r;
  if (excess < -1e-12 * std::max(1.0, n_bar)) throw DomainError("energy constraint violated: alpha_r^2 > n_bar");
  return std::sqrt(m * std::max(0.0, excess));
}

inline EaCoherentLaw ea_coherent_law(int m, double alpha_r, const ChangeScenario& scenario, int s) {
  scenario.validate();
  const double sinh_r = ea_squeezing(m, alpha_r, scenario.n_bar);
  const double eta = scenario.eta(s);
  const double v = (1.0 + 2.0 * scenario.n_bar_B * (1.0 - eta)) / 4.0;
  const double c = eta * std::expm1(-2.0 * std::asinh(sinh_r)) / (4.0 * m);
  EaCoherentLaw law;
  law.m = m;
  law.mean_vec = Vector::Constant(m, std::sqrt(eta) * alpha_r);
  law.cov = v * Matrix::Identity(m, m) + c * Matrix::Ones(m, m);
  return law;
}

/// D(N(μ1, Σ1) || N(μ0, Σ0)) for multivariate Gaussian laws.
inline double gaussian_kl(const EaCoherentLaw& post, const EaCoherentLaw& pre) {
  post.validate();
  pre.validate();
  if (post.m != pre.m) throw DomainError("gaussian_kl: block lengths differ");
  const Eigen::LLT<Matrix> l0(pre.cov);
  const Eigen::LLT<Matrix> l1(post.cov);
  if (l0.info() != Eigen::Success || l1.info() != Eigen::Success)
    throw NumericError("gaussian_kl: covariance is not positive definite");
  const Vector shift = post.mean_vec - pre.mean_vec;
  const double trace = l0.solve(post.cov).trace();
  const double maha = shift.dot(l0.solve(shift));
  const double logdet0 = 2.0 * l0.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double logdet1 = 2.0 * l1.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return std::max(0.0, 0.5 * (trace - post.m + logdet0 - logdet1 + maha));
}

/// Relative entropy per mode of the EA-coherent homodyne records.
inline double re_ea_coherent_homodyne(int m, double alpha_r, const ChangeScenario& scenario) {
  return gaussian_kl(ea_coherent_law(m, alpha_r, scenario, 1), ea_coherent_law(m, alpha_r, scenario, 0)) / m;
}

/// Maximizes the per-mode EA relative entropy over α_r ∈ [0, √n̄].
inline Maximum optimize_alpha_ea(int m, const ChangeScenario& scenario) {
  scenario.validate();
  const double top = std::sqrt(scenario.n_bar);
  auto f = [&](double a) { return re_ea_coherent_homodyne(m, std::min(a, top), scenario); };
  return grid_golden_maximize(f, 0.0, top, 64, 1e-6 * std::max(top, 1e-300));
}

/// m-mode input state of the EA probe: one squeezed mode spread by an
/// orthogonal network onto all modes, each displaced by α_r.
inline GaussianState ea_coherent_state(int m, double alpha_r, double n_bar) {
  const double sinh_r = ea_squeezing(m, alpha_r, n_bar);
  const double r = std::asinh(sinh_r);
  // Householder reflection sending e_1 to the uniform vector 1/√m
  Vector u = Vector::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
  u(0) -= 1.0;
  Matrix o = Matrix::Identity(m, m);
  if (u.norm() > 0.0) o -= 2.0 * u * u.transpose() / u.squaredNorm();
  Matrix block = 0.5 * Matrix::Identity(m, m);
  Matrix q = block, p = block;
  q(0, 0) = 0.5 * std::exp(-2.0 * r);
  p(0, 0) = 0.5 * std::exp(2.0 * r);
  Matrix cov = Matrix::Zero(2 * m, 2 * m);
  cov.topLeftCorner(m, m) = o * q * o.transpose();
  cov.bottomRightCorner(m, m) = o * p * o.transpose();
  Vector mean = Vector::Zero(2 * m);
  mean.head(m).setConstant(std::sqrt(2.0) * alpha_r);
  return {mean, cov};
}

// ---------------------------------------------------------------------------
// TMSV probe with a matched inverse squeezer.

struct PnrRates {
  double q0 = 0.0;
  double q1 = 0.0;
};

/// Signal occupancy left after undoing L(ν) on a state with standard form `form`.
inline double residual_occupancy(const TwoModeStandardForm& form, double nu) {
  const double residual = form.nu * std::sqrt(1.0 + nu * nu) - nu * std::sqrt(1.0 + form.nu * form.nu);
  return form.n_t1 + residual * residual * (form.n_t1 + form.n_t2 + 1.0);
}

/// Mean counts behind the inverse squeezer L(-ν0) tuned to the prechange output.
inline PnrRates tmsv_pnr_rates(const ChangeScenario& scenario) {
  scenario.validate();
  const auto form0 = tmsv_output_standard_form(scenario.n_bar, scenario.eta0, scenario.n_bar_B);
  const GaussianState post = apply_lossy_thermal(make_tmsv(scenario.n_bar), 0, scenario.eta1, scenario.n_bar_B);
  return {form0.n_t1, reduced_thermal_occupancy(post, form0.nu)};
}

/// Mean counts behind an inverse squeezer with an arbitrary coefficient ν.
inline PnrRates tmsv_pnr_rates_at(const ChangeScenario& scenario, double nu) {
  scenario.validate();
  detail::require(std::isfinite(nu), "squeezer coefficient must be finite");
  return {residual_occupancy(tmsv_output_standard_form(scenario.n_bar, scenario.eta0, scenario.n_bar_B), nu),
          residual_occupancy(tmsv_output_standard_form(scenario.n_bar, scenario.eta1, scenario.n_bar_B), nu)};
}

/// D(geometric(q1) || geometric(q0)).
inline EntropyValue pnr_entropy_infinite(double q0, double q1) {
  detail::require(q0 >= 0.0 && q1 >= 0.0, "mean counts must be >= 0");
  if (q1 == q0) return EntropyValue::finite(0.0);
  if (q0 == 0.0) return EntropyValue::divergent();
  const double first = q1 > 0.0 ? q1 * std::log(q1 / q0) : 0.0;
  return EntropyValue::finite(std::max(0.0, first + (1.0 + q1) * (std::log1p(q0) - std::log1p(q1))));
}

/// (1 - t^{l+1}) S^(∞), t = q1/(1+q1).
inline EntropyValue pnr_entropy_series_form(double q0, double q1, int resolution) {
  detail::require(resolution >= 1, "resolution must be >= 1");
  const EntropyValue full = pnr_entropy_infinite(q0, q1);
  if (full.diverged) return full;
  const double t = q1 / (1.0 + q1);
  return EntropyValue::finite(-std::expm1((resolution + 1.0) * std::log(t)) * full.value);
}

/// Binary on/off detector relative entropy.
inline EntropyValue spd_entropy(double q0, double q1) {
  detail::require(q0 >= 0.0 && q1 >= 0.0, "mean counts must be >= 0");
  if (q1 == q0) return EntropyValue::finite(0.0);
  if (q0 == 0.0) return EntropyValue::divergent();
  const double off = (std::log1p(q0) - std::log1p(q1)) / (1.0 + q1);
  const double on = q1 > 0.0 ? q1 / (1.0 + q1) * std::log(q1 * (1.0 + q0) / ((1.0 + q1) * q0)) : 0.0;
  return EntropyValue::finite(std::max(0.0, off + on));
}

/// Relative entropy of the geometric laws coarse-grained to {0, ..., l-1, >= l}.
inline EntropyValue pnr_entropy_lumped(double q0, double q1, int resolution) {
  detail::require(resolution >= 1, "resolution must be >= 1");
  detail::require(q0 >= 0.0 && q1 >= 0.0, "mean counts must be >= 0");
  if (q1 == q0) return EntropyValue::finite(0.0);
  if (q0 == 0.0) return EntropyValue::divergent();
  const double lt1 = q1 > 0.0 ? std::log(q1 / (1.0 + q1)) : -std::numeric_limits<double>::infinity();
  const double lt0 = std::log(q0 / (1.0 + q0));
  const double head = std::log1p(q0) - std::log1p(q1);  // ln p1(0)/p0(0)
  double sum = 0.0;
  for (int k = 0; k < resolution; ++k) {
    const double lp1 = -std::log1p(q1) + (k > 0 ? k * lt1 : 0.0);
    if (lp1 < -745.0) break;
    sum += std::exp(lp1) * (head + k * (lt1 - lt0));
  }
  if (q1 > 0.0) {
    const double ltail1 = resolution * lt1;
    if (ltail1 > -745.0) sum += std::exp(ltail1) * resolution * (lt1 - lt0);
  }
  return EntropyValue::finite(std::max(0.0, sum));
}

/// Photon-number resolution: a maximum count l, or unlimited.
using Resolution = std::optional<int>;

struct TmsvPnrEntropy {
  EntropyValue series_form;
  EntropyValue direct_lumped;
};

inline TmsvPnrEntropy pnr_entropies(const PnrRates& rates, const Resolution& resolution) {
  if (!resolution) {
    const auto full = pnr_entropy_infinite(rates.q0, rates.q1);
    return {full, full};
  }
  return {pnr_entropy_series_form(rates.q0, rates.q1, *resolution),
          pnr_entropy_lumped(rates.q0, rates.q1, *resolution)};
}

inline TmsvPnrEntropy re_tmsv_pnr(const ChangeScenario& scenario, const Resolution& resolution) {
  return pnr_entropies(tmsv_pnr_rates(scenario), resolution);
}

inline EntropyValue re_tmsv_spd(const ChangeScenario& scenario) {
  const auto rates = tmsv_pnr_rates(scenario);
  return spd_entropy(rates.q0, rates.q1);
}

struct SqueezerOptimum {
  double nu = 0.0;
  PnrRates rates;
  EntropyValue value;
};

/// Inverse-squeezer coefficient maximizing S^(∞) over ν ∈ [0, 4ν0].
inline SqueezerOptimum optimize_pnr_squeezer(const ChangeScenario& scenario) {
  scenario.validate();
  const double nu0 = tmsv_output_standard_form(scenario.n_bar, scenario.eta0, scenario.n_bar_B).nu;
  auto f = [&](double nu) {
    const auto r = tmsv_pnr_rates_at(scenario, nu);
    const auto s = pnr_entropy_infinite(r.q0, r.q1);
    return s.diverged ? std::numeric_limits<double>::max() : s.value;
  };
  const Maximum best = grid_golden_maximize(f, 0.0, 4.0 * nu0, 33, 1e-9 * std::max(1.0, nu0));
  const auto rates = tmsv_pnr_rates_at(scenario, best.argmax);
  return {best.argmax, rates, pnr_entropy_infinite(rates.q0, rates.q1)};
}

enum class HomodyneChain { matched_tms, direct };

/// Homodyne in place of the counter: behind the matched squeezer, or directly on the signal.
inline double re_tmsv_homodyne(const ChangeScenario& scenario, HomodyneChain chain) {
  scenario.validate();
  if (chain == HomodyneChain::matched_tms) {
    const auto r = tmsv_pnr_rates(scenario);
    return gaussian_kl(GaussianChannelLaw{0.0, r.q1 + 0.5}, GaussianChannelLaw{0.0, r.q0 + 0.5});
  }
  auto variance = [&](int s) {
    const double eta = scenario.eta(s);
    return (1.0 + 2.0 * scenario.n_bar_B * (1.0 - eta) + 2.0 * scenario.n_bar * eta) / 4.0;
  };
  return gaussian_kl(GaussianChannelLaw{0.0, variance(1)}, GaussianChannelLaw{0.0, variance(0)});
}

}  // namespace qchange
