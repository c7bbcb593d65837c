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

#include <memory>
#include <optional>
#include <string>

#include "qchange/cusum.hpp"
#include "qchange/io.hpp"
#include "qchange/jointcomm.hpp"
#include "qchange/photon_counting.hpp"
#include "qchange/receivers.hpp"

namespace qchange {

/// Transceiver descriptor for make_model, written "kind" or "kind:arg".
///
///   coherent_homodyne
///   squeezed_coherent_homodyne[:alpha_r]     (default: optimized α_r)
///   kennedy
///   tmsv_pnr[:l|inf]                         (default: inf)
///   tmsv_two_pnr
///   tmsv_homodyne[:matched_tms|direct]       (default: matched_tms)
///   fock_pnr
///   mixture_bpsk_homodyne[:r]                (default: r = 0)
///   mixture_gaussian_homodyne[:r]
///   plugin_pmf:PATH
struct ModelSpec {
  std::string kind;
  std::string arg;

  static ModelSpec parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return {text, ""};
    return {text.substr(0, colon), text.substr(colon + 1)};
  }

  std::string label() const { return arg.empty() ? kind : kind + ":" + arg; }
};

namespace detail {

inline double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw DomainError("invalid " + what + " '" + text + "'");
  }
}

inline Resolution parse_resolution(const std::string& text) {
  if (text.empty() || text == "inf") return std::nullopt;
  const double v = parse_number(text, "resolution");
  if (v < 1.0 || v != std::floor(v)) throw DomainError("resolution must be a positive integer or 'inf'");
  return static_cast<int>(v);
}

inline std::vector<double> geometric_bins(double q, const Resolution& resolution) {
  if (!resolution) return thermal_pmf(q).folded();
  const int l = *resolution;
  std::vector<double> p(static_cast<std::size_t>(l) + 1);
  const double t = q / (1.0 + q);
  for (int k = 0; k < l; ++k) p[static_cast<std::size_t>(k)] = std::pow(t, k) / (1.0 + q);
  p[static_cast<std::size_t>(l)] = std::pow(t, l);
  return p;
}

}  // namespace detail

/// Binds a transceiver's prechange and postchange data laws to the CUSUM engine.
inline ModelPtr make_model(const ModelSpec& spec, const ChangeScenario& scenario) {
  scenario.validate();
  const std::string name = spec.label();
  const auto& k = spec.kind;
  if (k == "coherent_homodyne")
    return std::make_shared<NormalPairModel>(name, coherent_homodyne_law(scenario, 1), coherent_homodyne_law(scenario, 0));
  if (k == "squeezed_coherent_homodyne") {
    const double alpha =
        spec.arg.empty() ? optimize_alpha_ea(1, scenario).argmax : detail::parse_number(spec.arg, "alpha_r");
    const auto law = [&](int s) {
      const auto l = ea_coherent_law(1, alpha, scenario, s);
      return GaussianChannelLaw{l.mean_vec(0), l.cov(0, 0)};
    };
    return std::make_shared<NormalPairModel>(name, law(1), law(0));
  }
  if (k == "kennedy") {
    const DiscretePmf post = kennedy_pmf(scenario, 1);
    return std::make_shared<DiscreteModel>(name, post, kennedy_pmf(scenario, 0, post.cutoff()));
  }
  if (k == "tmsv_pnr") {
    const auto resolution = detail::parse_resolution(spec.arg);
    const auto rates = tmsv_pnr_rates(scenario);
    auto pmf = [&](double q) {
      auto bins = detail::geometric_bins(q, resolution);
      return DiscretePmf(std::move(bins), 0.0);
    };
    return std::make_shared<DiscreteModel>(name, pmf(rates.q1), pmf(rates.q0));
  }
  if (k == "tmsv_two_pnr") {
    const TwoPnrGrid grid = two_pnr_grid(scenario);
    return std::make_shared<DiscreteModel>(name, DiscretePmf(grid.post, grid.post_tail),
                                           DiscretePmf(grid.pre, grid.pre_tail));
  }
  if (k == "tmsv_homodyne") {
    if (!spec.arg.empty() && spec.arg != "matched_tms" && spec.arg != "direct")
      throw DomainError("tmsv_homodyne chain must be matched_tms or direct");
    if (spec.arg == "direct") {
      auto law = [&](int s) {
        const double eta = scenario.eta(s);
        return GaussianChannelLaw{0.0, (1.0 + 2.0 * scenario.n_bar_B * (1.0 - eta) + 2.0 * scenario.n_bar * eta) / 4.0};
      };
      return std::make_shared<NormalPairModel>(name, law(1), law(0));
    }
    const auto rates = tmsv_pnr_rates(scenario);
    return std::make_shared<NormalPairModel>(name, GaussianChannelLaw{0.0, rates.q1 + 0.5},
                                             GaussianChannelLaw{0.0, rates.q0 + 0.5});
  }
  if (k == "fock_pnr") {
    if (!is_fock_photon_number(scenario.n_bar)) throw DomainError("fock_pnr needs an integer n_bar");
    const int n = static_cast<int>(scenario.n_bar);
    return std::make_shared<DiscreteModel>(name, fock_output_pmf(n, scenario.eta1, scenario.n_bar_B),
                                           fock_output_pmf(n, scenario.eta0, scenario.n_bar_B));
  }
  if (k == "mixture_bpsk_homodyne" || k == "mixture_gaussian_homodyne") {
    const auto kind = k == "mixture_bpsk_homodyne" ? ModulationKind::bpsk : ModulationKind::gaussian_mod;
    const double r = spec.arg.empty() ? 0.0 : detail::parse_number(spec.arg, "squeezing r");
    const ModulationScheme scheme = make_scheme(kind, scenario.n_bar, r);
    return std::make_shared<NormalMixtureModel>(name, mixture_output_law(scheme, scenario.eta1, scenario.n_bar_B),
                                                mixture_output_law(scheme, scenario.eta0, scenario.n_bar_B));
  }
  if (k == "plugin_pmf") {
    if (spec.arg.empty()) throw DomainError("plugin_pmf needs a file path (plugin_pmf:PATH)");
    const PluginChannel channel = io::load_plugin_channel(spec.arg);
    return std::make_shared<DiscreteModel>(
        name, DiscretePmf::from_truncated(detail::output_marginal(channel.prior, channel.post)),
        DiscretePmf::from_truncated(detail::output_marginal(channel.prior, channel.pre)));
  }
  throw DomainError("unknown transceiver kind '" + k + "'");
}

}  // namespace qchange
