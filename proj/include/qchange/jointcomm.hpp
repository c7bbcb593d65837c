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
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qchange/entropy.hpp"
#include "qchange/errors.hpp"
#include "qchange/gaussian_state.hpp"
#include "qchange/optimize.hpp"
#include "qchange/pmf.hpp"
#include "qchange/receivers.hpp"

namespace qchange {

inline constexpr double kEnergyTolerance = 1e-10;
inline constexpr double kQuadratureTolerance = 1e-9;

enum class ModulationKind { bpsk, gaussian_mod };

inline const char* to_string(ModulationKind kind) { return kind == ModulationKind::bpsk ? "bpsk" : "gaussian_mod"; }

/// Squeezed-coherent codebook: BPSK ±α or real Gaussian amplitudes of variance σ²,
/// all sharing a q-squeezer r. Energy per use: α² (or σ²) + sinh²r = n̄.
struct ModulationScheme {
  ModulationKind kind = ModulationKind::bpsk;
  double alpha = 0.0;
  double sigma2 = 0.0;
  double r = 0.0;

  double displacement_energy() const { return kind == ModulationKind::bpsk ? alpha * alpha : sigma2; }
  double energy() const { return displacement_energy() + std::pow(std::sinh(r), 2); }

  void validate(double n_bar) const {
    if (!(alpha >= 0.0 && sigma2 >= 0.0 && r >= 0.0) || !std::isfinite(alpha + sigma2 + r))
      throw DomainError("ModulationScheme: parameters must be finite and >= 0");
    if (std::abs(energy() - n_bar) > kEnergyTolerance * std::max(1.0, n_bar))
      throw DomainError("ModulationScheme: energy constraint violated");
  }
};

/// Scheme of the given kind whose remaining energy n̄ - sinh²r goes into displacement.
inline ModulationScheme make_scheme(ModulationKind kind, double n_bar, double r) {
  detail::require(std::isfinite(n_bar) && n_bar >= 0.0, "n_bar must be >= 0");
  detail::require(std::isfinite(r) && r >= 0.0, "squeezing r must be >= 0");
  const double squeeze = std::pow(std::sinh(r), 2);
  if (squeeze > n_bar * (1.0 + kEnergyTolerance)) throw DomainError("squeezing energy exceeds n_bar");
  const double rest = std::max(0.0, n_bar - squeeze);
  ModulationScheme s;
  s.kind = kind;
  s.r = r;
  if (kind == ModulationKind::bpsk)
    s.alpha = std::sqrt(rest);
  else
    s.sigma2 = rest;
  return s;
}

/// Equal-variance normal mixture Σ w_i N(μ_i, v).
struct NormalMixture {
  std::vector<double> weights;
  std::vector<double> means;
  double variance = 0.25;

  void validate() const {
    if (weights.empty() || weights.size() != means.size()) throw DomainError("NormalMixture: bad component lists");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw DomainError("NormalMixture: negative weight");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("NormalMixture: weights do not sum to 1");
    if (!(variance > 0.0) || !std::isfinite(variance)) throw DomainError("NormalMixture: variance must be > 0");
  }

  double component_log_pdf(std::size_t i, double y) const {
    const double z = y - means[i];
    return -0.5 * (z * z / variance + std::log(2.0 * std::numbers::pi * variance));
  }

  double log_pdf(double y) const {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] > 0.0) top = std::max(top, std::log(weights[i]) + component_log_pdf(i, y));
    double sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] > 0.0) sum += std::exp(std::log(weights[i]) + component_log_pdf(i, y) - top);
    return top + std::log(sum);
  }

  double sigma() const { return std::sqrt(variance); }
  double lowest_mean() const { return *std::min_element(means.begin(), means.end()); }
  double highest_mean() const { return *std::max_element(means.begin(), means.end()); }
};

/// Homodyne law of |x; r⟩ after the channel, in units where vacuum variance is 1/4.
inline GaussianChannelLaw squeezed_coherent_law(double x, double r, double eta, double n_bar_B) {
  const GaussianState out = apply_lossy_thermal(make_squeezed_coherent(x, r), 0, eta, n_bar_B);
  return {out.mean()(0) / std::sqrt(2.0), out.cov()(0, 0) / 2.0};
}

/// Codeword-averaged output law. Gaussian modulation stays Gaussian and is
/// returned as a single component with the total variance.
inline NormalMixture mixture_output_law(const ModulationScheme& scheme, double eta, double n_bar_B) {
  detail::require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
  detail::require(n_bar_B >= 0.0, "n_bar_B must be >= 0");
  if (scheme.kind == ModulationKind::bpsk) {
    const auto plus = squeezed_coherent_law(scheme.alpha, scheme.r, eta, n_bar_B);
    return {{0.5, 0.5}, {plus.mean, -plus.mean}, plus.variance};
  }
  const auto law = squeezed_coherent_law(0.0, scheme.r, eta, n_bar_B);
  return {{1.0}, {0.0}, law.variance + eta * scheme.sigma2};
}

namespace detail {

/// Adaptive Gauss–Kronrod over [lo, hi], split at the given interior breakpoints.
template <class F>
double integrate(F f, std::vector<double> breaks, double lo, double hi, double abs_tolerance) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i] < lo || breaks[i + 1] > hi) continue;
    double e = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, breaks[i], breaks[i + 1], 12, 1e-11, &e);
    error += e;
  }
  if (!(error <= abs_tolerance) || !std::isfinite(total)) throw NumericError("quadrature did not converge");
  return total;
}

inline double envelope_lo(const NormalMixture& m) { return m.lowest_mean() - 10.0 * m.sigma(); }
inline double envelope_hi(const NormalMixture& m) { return m.highest_mean() + 10.0 * m.sigma(); }

}  // namespace detail

/// I(X;Y) = Σ_i w_i D(N(μ_i, v) || mixture), in nats.
inline double mixture_mutual_information(const NormalMixture& law) {
  law.validate();
  auto f = [&](double y) {
    const double lp = law.log_pdf(y);
    double s = 0.0;
    for (std::size_t i = 0; i < law.weights.size(); ++i) {
      if (law.weights[i] <= 0.0) continue;
      const double li = law.component_log_pdf(i, y);
      s += law.weights[i] * std::exp(li) * (li - lp);
    }
    return s;
  };
  const double mi =
      detail::integrate(f, law.means, detail::envelope_lo(law), detail::envelope_hi(law), kQuadratureTolerance);
  return std::max(0.0, mi);
}

/// BPSK capacity with homodyne detection on the prechange channel (uniform prior).
inline double capacity_bpsk_homodyne(const ModulationScheme& scheme, double eta0, double n_bar_B) {
  detail::require(scheme.kind == ModulationKind::bpsk, "capacity_bpsk_homodyne needs a BPSK scheme");
  if (scheme.alpha == 0.0) return 0.0;
  return std::min(std::log(2.0), mixture_mutual_information(mixture_output_law(scheme, eta0, n_bar_B)));
}

/// Gaussian-modulation capacity ½ ln(V_Y / V_{Y|X}) on the prechange channel.
inline double capacity_gaussian_homodyne(const ModulationScheme& scheme, double eta0, double n_bar_B) {
  detail::require(scheme.kind == ModulationKind::gaussian_mod, "capacity_gaussian_homodyne needs a Gaussian scheme");
  const double conditional = squeezed_coherent_law(0.0, scheme.r, eta0, n_bar_B).variance;
  return 0.5 * std::log1p(eta0 * scheme.sigma2 / conditional);
}

inline double scheme_capacity(const ModulationScheme& scheme, double eta0, double n_bar_B) {
  return scheme.kind == ModulationKind::bpsk ? capacity_bpsk_homodyne(scheme, eta0, n_bar_B)
                                             : capacity_gaussian_homodyne(scheme, eta0, n_bar_B);
}

/// D(p1 || p0) between two normal mixtures by quadrature over the p1 envelope.
inline double mixture_kl(const NormalMixture& post, const NormalMixture& pre) {
  post.validate();
  pre.validate();
  if (post.weights.size() == 1 && pre.weights.size() == 1)
    return gaussian_kl(GaussianChannelLaw{post.means[0], post.variance}, GaussianChannelLaw{pre.means[0], pre.variance});
  auto f = [&](double y) {
    const double l1 = post.log_pdf(y);
    return std::exp(l1) * (l1 - pre.log_pdf(y));
  };
  std::vector<double> breaks = post.means;
  breaks.insert(breaks.end(), pre.means.begin(), pre.means.end());
  return std::max(
      0.0, detail::integrate(f, breaks, detail::envelope_lo(post), detail::envelope_hi(post), kQuadratureTolerance));
}

/// Relative entropy per use between the postchange and prechange mixtures.
inline double mixture_re(const ModulationScheme& scheme, const ChangeScenario& scenario) {
  scenario.validate();
  scheme.validate(scenario.n_bar);
  return mixture_kl(mixture_output_law(scheme, scenario.eta1, scenario.n_bar_B),
                    mixture_output_law(scheme, scenario.eta0, scenario.n_bar_B));
}

// ---------------------------------------------------------------------------
// Plug-in discrete channels.

/// Discrete memoryless channel with prechange and postchange transition matrices.
struct PluginChannel {
  std::vector<std::string> labels_x;
  std::vector<std::string> labels_y;
  std::vector<double> prior;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;

  std::size_t inputs() const { return prior.size(); }
  std::size_t outputs() const { return pre.empty() ? 0 : pre.front().size(); }

  void validate() const {
    const std::size_t nx = prior.size();
    if (nx == 0) throw DomainError("PluginChannel: empty prior");
    if (pre.size() != nx || post.size() != nx) throw DomainError("PluginChannel: matrix rows must match the prior");
    const std::size_t ny = outputs();
    if (ny == 0) throw DomainError("PluginChannel: empty output alphabet");
    if (!labels_x.empty() && labels_x.size() != nx) throw DomainError("PluginChannel: labels_x size mismatch");
    if (!labels_y.empty() && labels_y.size() != ny) throw DomainError("PluginChannel: labels_y size mismatch");
    double total = 0.0;
    for (double p : prior) {
      if (!(p >= 0.0 && p <= 1.0)) throw DomainError("PluginChannel: prior entry outside [0, 1]");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("PluginChannel: prior does not sum to 1");
    for (const auto* m : {&pre, &post}) {
      for (const auto& row : *m) {
        if (row.size() != ny) throw DomainError("PluginChannel: ragged transition matrix");
        double s = 0.0;
        for (double p : row) {
          if (!(p >= 0.0 && p <= 1.0)) throw DomainError("PluginChannel: transition entry outside [0, 1]");
          s += p;
        }
        if (std::abs(s - 1.0) > kPmfNormTolerance) throw DomainError("PluginChannel: row does not sum to 1");
      }
    }
  }
};

namespace detail {

inline std::vector<double> output_marginal(const std::vector<double>& prior, const std::vector<std::vector<double>>& w) {
  std::vector<double> q(w.front().size(), 0.0);
  for (std::size_t x = 0; x < prior.size(); ++x)
    for (std::size_t y = 0; y < q.size(); ++y) q[y] += prior[x] * w[x][y];
  return q;
}

// D(W(.|x) || q) for every input x
inline std::vector<double> row_divergences(const std::vector<std::vector<double>>& w, const std::vector<double>& q) {
  std::vector<double> d(w.size(), 0.0);
  for (std::size_t x = 0; x < w.size(); ++x)
    for (std::size_t y = 0; y < q.size(); ++y)
      if (w[x][y] > 0.0) d[x] += w[x][y] * std::log(w[x][y] / q[y]);
  return d;
}

}  // namespace detail

/// I(X;Y) of the transition matrix w under the given prior.
inline double mutual_information(const std::vector<double>& prior, const std::vector<std::vector<double>>& w) {
  const auto d = detail::row_divergences(w, detail::output_marginal(prior, w));
  double mi = 0.0;
  for (std::size_t x = 0; x < prior.size(); ++x) mi += prior[x] * d[x];
  return std::max(0.0, mi);
}

struct CapacityResult {
  double capacity = 0.0;        // lower bound at the final prior
  double upper_bound = 0.0;     // max_x D(W(.|x) || q)
  double fixed_prior_mi = 0.0;  // I(X;Y) at the channel's own prior
  std::vector<double> optimal_prior;
  std::vector<double> mi_history;
  int iterations = 0;
};

/// Blahut–Arimoto capacity of the prechange matrix.
inline CapacityResult plugin_capacity(const PluginChannel& channel, double rel_tolerance = 1e-9,
                                      int max_iterations = 10'000) {
  channel.validate();
  const auto& w = channel.pre;
  const std::size_t nx = channel.inputs();
  CapacityResult out;
  out.fixed_prior_mi = mutual_information(channel.prior, w);
  std::vector<double> p(nx, 1.0 / static_cast<double>(nx));
  for (int it = 0; it < max_iterations; ++it) {
    const auto d = detail::row_divergences(w, detail::output_marginal(p, w));
    double lower = 0.0;
    for (std::size_t x = 0; x < nx; ++x) lower += p[x] * d[x];
    const double upper = *std::max_element(d.begin(), d.end());
    out.mi_history.push_back(std::max(0.0, lower));
    out.iterations = it + 1;
    if (upper - lower <= rel_tolerance * std::max(lower, std::numeric_limits<double>::min())) {
      out.capacity = std::max(0.0, lower);
      out.upper_bound = upper;
      out.optimal_prior = p;
      return out;
    }
    const double top = upper;
    double norm = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      p[x] *= std::exp(d[x] - top);
      norm += p[x];
    }
    for (double& v : p) v /= norm;
  }
  throw NumericError("plugin_capacity: Blahut-Arimoto did not converge");
}

/// D(prior·post || prior·pre) of the output mixtures.
inline EntropyValue plugin_mixture_re(const PluginChannel& channel) {
  channel.validate();
  return discrete_re(DiscretePmf::from_truncated(detail::output_marginal(channel.prior, channel.post)),
                     DiscretePmf::from_truncated(detail::output_marginal(channel.prior, channel.pre)));
}

// ---------------------------------------------------------------------------
// Capacity versus relative-entropy trade-off.

struct TradeoffPoint {
  std::string scheme;
  double r = 0.0;
  double displacement_energy = 0.0;
  double capacity = 0.0;  // nats per use on the prechange channel
  double re = 0.0;        // nats per use, postchange vs prechange mixture
};

struct TradeoffCurve {
  std::vector<TradeoffPoint> points;
  std::size_t capacity_argmax = 0;  // index into points
  Maximum continuous_optimum;       // capacity maximized over r on the whole interval
};

/// Largest squeezing that fits in the energy budget.
inline double max_squeezing(double n_bar) { return std::asinh(std::sqrt(n_bar)); }

/// Default r grid: `points` values evenly spaced on [0, asinh √n̄].
inline std::vector<double> default_r_grid(double n_bar, int points = 21) {
  detail::require(points >= 2, "r grid needs at least two points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double top = max_squeezing(n_bar);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = top * i / (points - 1.0);
  return grid;
}

inline TradeoffPoint tradeoff_point(ModulationKind kind, const ChangeScenario& scenario, double r) {
  const ModulationScheme scheme = make_scheme(kind, scenario.n_bar, std::min(r, max_squeezing(scenario.n_bar)));
  scheme.validate(scenario.n_bar);
  return {to_string(kind), scheme.r, scheme.displacement_energy(),
          scheme_capacity(scheme, scenario.eta0, scenario.n_bar_B), mixture_re(scheme, scenario)};
}

inline TradeoffCurve tradeoff_sweep(ModulationKind kind, const ChangeScenario& scenario,
                                    const std::vector<double>& r_grid) {
  scenario.validate();
  detail::require(!r_grid.empty(), "r grid is empty");
  const double top = max_squeezing(scenario.n_bar);
  TradeoffCurve curve;
  for (double r : r_grid) {
    if (!(r >= 0.0 && r <= top * (1.0 + 1e-12))) throw DomainError("r grid value violates the energy constraint");
    curve.points.push_back(tradeoff_point(kind, scenario, r));
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    if (curve.points[i].capacity > curve.points[curve.capacity_argmax].capacity) curve.capacity_argmax = i;
  auto cap = [&](double r) {
    return scheme_capacity(make_scheme(kind, scenario.n_bar, std::min(r, top)), scenario.eta0, scenario.n_bar_B);
  };
  curve.continuous_optimum = grid_golden_maximize(cap, 0.0, top, 64, 1e-9 * std::max(top, 1e-300));
  return curve;
}

/// Covariance of the BPSK-modulated TMSV codeword i ∈ {0, 1}.
inline GaussianState bpsk_tmsv_covariance(double n_bar, int i) {
  detail::require(i == 0 || i == 1, "codeword index must be 0 or 1");
  detail::require(std::isfinite(n_bar) && n_bar >= 0.0, "n_bar must be >= 0");
  const double mu1 = n_bar + 0.5;
  const double mu2 = std::sqrt(n_bar * (n_bar + 1.0));
  const double sq = i == 0 ? mu2 : -mu2;
  Matrix cov(4, 4);
  cov << mu1, sq, 0, 0,
         sq, mu1, 0, 0,
         0, 0, mu1, -sq,
         0, 0, -sq, mu1;
  return {Vector::Zero(4), cov};
}

}  // namespace qchange
