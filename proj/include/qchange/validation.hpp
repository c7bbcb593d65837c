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
#include <random>
#include <string>
#include <vector>

#include "qchange/commands.hpp"

namespace qchange::cli {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Names accepted by --mutate; each perturbs one closed-form reference.
inline const std::vector<std::string>& mutation_names() {
  static const std::vector<std::string> names{"qre_tmsv",  "qre_coh",      "lownoise_coefficient",
                                              "linear_coefficient", "spd_formula", "geometric_marginal",
                                              "binomial_limit", "ba_identity", "homodyne_kl"};
  return names;
}

namespace detail {

inline double max_rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Least-squares slope of ys against xs.
inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// QRE per mode of the EA probe with the channel applied on every mode.
inline EntropyValue ea_probe_qre(int m, double alpha_r, const ChangeScenario& s) {
  GaussianState pre = ea_coherent_state(m, alpha_r, s.n_bar), post = pre;
  for (int k = 0; k < m; ++k) {
    pre = apply_lossy_thermal(pre, k, s.eta0, s.n_bar_B);
    post = apply_lossy_thermal(post, k, s.eta1, s.n_bar_B);
  }
  EntropyValue d = gaussian_qre(post, pre);
  if (!d.diverged) d.value /= m;
  return d;
}

inline double ceiling(const EntropyValue& v) {
  return v.diverged ? std::numeric_limits<double>::infinity() : v.value;
}

}  // namespace detail

/// Oracle grid used by the equivalence checks.
inline std::vector<ChangeScenario> oracle_grid() {
  std::vector<ChangeScenario> out;
  const std::pair<double, double> etas[] = {{0.9, 0.8}, {0.5, 0.4}, {0.99, 0.9}, {0.3, 0.1}, {0.8, 0.79}};
  for (double n : {0.1, 1.0, 5.0, 50.0, 400.0})
    for (double nb : {1e-4, 1e-3, 1e-2, 1e-1, 1.0})
      for (auto [e0, e1] : etas) out.push_back({n, nb, e0, e1});
  return out;
}

/// Scenarios of the data-processing scan.
inline std::vector<ChangeScenario> dpi_grid() {
  std::vector<ChangeScenario> out;
  for (double nb : log_grid(1e-5, 1.0, 21)) out.push_back({5.0, nb, 0.9, 0.8});
  const std::pair<double, double> etas[] = {{0.9, 0.8}, {0.5, 0.4}, {0.99, 0.9}};
  for (double n : {0.5, 5.0, 50.0})
    for (double nb : {1e-3, 0.1, 1.0})
      for (auto [e0, e1] : etas) out.push_back({n, nb, e0, e1});
  return out;
}

/// Largest excess of a receiver RE over its probe QRE across the scan.
inline double dpi_violation(const ChangeScenario& s) {
  double worst = -std::numeric_limits<double>::infinity();
  auto bound = [&](double re, double qre) {
    if (std::isinf(qre)) return;
    worst = std::max(worst, re - qre);
  };
  auto entropy = [](const EntropyValue& v) { return detail::ceiling(v); };
  const double coh = entropy(qre_coherent(s));
  const double tms = entropy(qre_tmsv(s));
  bound(re_coherent_homodyne(s), coh);
  bound(entropy(re_kennedy(s)), coh);
  for (int m : {1, 2, 4}) {
    const Maximum best = optimize_alpha_ea(m, s);
    bound(best.value, entropy(detail::ea_probe_qre(m, best.argmax, s)));
  }
  for (const Resolution& l : {Resolution{1}, Resolution{2}, Resolution{}}) {
    const auto pnr = re_tmsv_pnr(s, l);
    bound(entropy(pnr.direct_lumped), tms);
    bound(entropy(pnr.series_form), tms);
  }
  bound(entropy(re_tmsv_spd(s)), tms);
  bound(entropy(re_two_pnr(s).value), tms);
  bound(entropy(optimize_pnr_squeezer(s).value), tms);
  bound(re_tmsv_homodyne(s, HomodyneChain::matched_tms), tms);
  bound(re_tmsv_homodyne(s, HomodyneChain::direct), tms);
  return worst;
}

/// Runs the invariant suite; `mutate` names a reference to scale by 1.05.
inline std::vector<CheckResult> run_checks(const std::string& mutate = {}) {
  if (!mutate.empty() && std::find(mutation_names().begin(), mutation_names().end(), mutate) == mutation_names().end())
    throw DomainError("unknown mutation '" + mutate + "'");
  auto mut = [&](const char* name) { return mutate == name ? 1.05 : 1.0; };
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double measured, double threshold) {
    out.push_back({std::move(name), measured, threshold, measured <= threshold});
  };
  auto add_positive = [&](std::string name, double measured) {
    out.push_back({std::move(name), measured, 0.0, measured > 0.0});
  };

  {
    double tmsv = 0.0, coh = 0.0;
    for (const auto& s : oracle_grid()) {
      const auto tmsv_out = channel_outputs(make_tmsv(s.n_bar), s);
      const auto coh_out = channel_outputs(make_coherent(s.n_bar), s);
      tmsv = std::max(tmsv, detail::max_rel(gaussian_qre(tmsv_out.post, tmsv_out.pre).value,
                                            qre_tmsv(s).value * mut("qre_tmsv")));
      coh = std::max(coh, detail::max_rel(gaussian_qre(coh_out.post, coh_out.pre).value,
                                          qre_coherent(s).value * mut("qre_coh")));
    }
    add("qre_tmsv_oracle_grid", tmsv, 1e-8);
    add("qre_coh_oracle_grid", coh, 1e-8);
  }

  {
    const ChangeScenario base = kFig2a;
    std::vector<double> xs, coh, tms;
    for (double nb : log_grid(1e-10, 1e-6, 9)) {
      const ChangeScenario s{base.n_bar, nb, base.eta0, base.eta1};
      xs.push_back(-std::log(nb));
      coh.push_back(qre_coherent(s).value);
      tms.push_back(qre_tmsv(s).value);
    }
    const auto c = lownoise_coefficients(base.n_bar, base.eta0, base.eta1);
    const double m = mut("lownoise_coefficient");
    add("lownoise_slope_coh", detail::max_rel(detail::fit_slope(xs, coh), c.coh_coeff * m), 1e-2);
    add("lownoise_slope_tmsv", detail::max_rel(detail::fit_slope(xs, tms), c.tmsv_coeff * m), 1e-2);
  }

  {
    const ChangeScenario s{1e6, 1.0, 0.9, 0.8};
    const double limit = tmsv_linear_coefficient(s.n_bar_B, s.eta0, s.eta1) * mut("linear_coefficient");
    const double pnr = re_tmsv_pnr(s, std::nullopt).series_form.value / s.n_bar;
    const double qre = qre_tmsv(s).value / s.n_bar;
    add("attainment_pnr_inf", detail::max_rel(pnr, limit), 1e-2);
    add("attainment_qre_tmsv", detail::max_rel(qre, limit), 1e-2);
    add("attainment_ratio", std::abs(pnr / qre - 1.0), 1e-2);
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : kappa_parameter_sets()) {
      const auto sweep = kappa_qre_sweep(s, linear_grid(0.0, 1.0, 21));
      for (std::size_t i = 1; i + 1 < sweep.points.size(); ++i)
        worst = std::min(worst, sweep.points[i].derivative);
    }
    add_positive("kappa_min_interior_derivative", worst);
  }

  {
    double worst = 0.0;
    for (const auto& s : dpi_grid()) worst = std::max(worst, dpi_violation(s));
    add("data_processing_scan", std::max(worst, 0.0), 1e-9);
  }

  {
    const ChangeScenario s = kFig2a;
    const auto l1 = re_tmsv_pnr(s, 1).direct_lumped.value;
    const auto l2 = re_tmsv_pnr(s, 2).direct_lumped.value;
    const auto inf = re_tmsv_pnr(s, std::nullopt).series_form.value;
    add("resolution_ordering", (l1 < l2 && l2 < inf) ? 0.0 : 1.0, 0.0);
    add("tmsv_over_coh", qre_tmsv(s).value > qre_coherent(s).value ? 0.0 : 1.0, 0.0);
    add("pnr_over_coh_homodyne", inf > re_coherent_homodyne(s) ? 0.0 : 1.0, 0.0);
  }

  {
    double worst = 0.0;
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> u(1e-3, 10.0);
    for (int i = 0; i < 100; ++i) {
      const double q0 = u(rng), q1 = u(rng);
      const double off1 = 1.0 / (1.0 + q1), off0 = 1.0 / (1.0 + q0);
      const double direct = off1 * std::log(off1 / off0) + (1.0 - off1) * std::log((1.0 - off1) / (1.0 - off0));
      worst = std::max(worst, std::abs(spd_entropy(q0, q1).value * mut("spd_formula") - direct));
    }
    add("spd_two_outcome_kl", worst, 1e-12);
  }

  {
    double worst = 0.0;
    for (const ChangeScenario& s : {kFig2a, ChangeScenario{5.0, 0.1, 0.9, 0.8}, ChangeScenario{50.0, 1.0, 0.5, 0.4}}) {
      for (int phase : {0, 1}) {
        const auto k = kennedy_pmf(s, phase);
        worst = std::max(worst, std::abs(k.mass() - 1.0));
      }
      const TwoPnrGrid g = two_pnr_grid(s);
      double post = 0.0, pre = 0.0;
      for (double p : g.post) post += p;
      for (double p : g.pre) pre += p;
      worst = std::max({worst, std::abs(post - 1.0), std::abs(pre - 1.0)});
    }
    for (int n : {1, 5, 20}) {
      const auto f = fock_output_pmf(n, 0.8, 0.1);
      worst = std::max(worst, std::abs(f.mass() - 1.0));
    }
    add("pmf_normalization", worst, 1e-8);
  }

  {
    double worst = 0.0;
    for (const ChangeScenario& s : {kFig2a, ChangeScenario{5.0, 1.0, 0.9, 0.8}}) {
      const TwoPnrGrid g = two_pnr_grid(s);
      const double q1 = tmsv_pnr_rates(s).q1;
      for (int k = 0; k <= g.k_max; ++k) {
        double row = 0.0;
        for (int l = 0; l <= g.l_max; ++l) row += g.post_at(k, l);
        const double geometric = std::pow(q1 / (1.0 + q1), k) / (1.0 + q1) * mut("geometric_marginal");
        worst = std::max(worst, std::abs(row - geometric));
      }
    }
    add("two_pnr_marginal", worst, 1e-8);
  }

  {
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n)
      for (int x = 0; x <= n; ++x) {
        const double binom = std::exp(log_factorial(n) - log_factorial(x) - log_factorial(n - x) +
                                      x * std::log(0.8) + (n - x) * std::log(0.2));
        worst = std::max(worst, std::abs(fock_pmf(x, n, 0.8, 1e-12) - binom * mut("binomial_limit")));
      }
    add("fock_binomial_limit", worst, 1e-6);
  }

  {
    PluginChannel identity{{}, {}, {0.5, 0.5}, {{1.0, 0.0}, {0.0, 1.0}}, {{0.5, 0.5}, {0.5, 0.5}}};
    add("ba_identity_capacity", std::abs(plugin_capacity(identity).capacity - std::log(2.0) * mut("ba_identity")),
        1e-9);
  }

  {
    double worst = 0.0;
    for (const auto& s : {kFig2a, kFig4, ChangeScenario{50.0, 1.0, 0.5, 0.4}}) {
      const double closed = re_coherent_homodyne(s) * mut("homodyne_kl");
      worst = std::max(worst, detail::max_rel(re_ea_coherent_homodyne(1, std::sqrt(s.n_bar), s), closed));
    }
    add("homodyne_kl_generic", worst, 1e-8);
  }

  {
    add("hyp2f1_rational", std::abs(hyp2f1_terminating(-3, -5, -8, 0.7) - 121.0 / 800.0), 1e-14);
    add("laguerre_reference", std::abs(assoc_laguerre(5, 2.0, 1.3) + 1.8124119166666667), 1e-12);
  }

  {
    const ModelPtr model = make_model(ModelSpec::parse("mixture_bpsk_homodyne"), kFig4);
    CusumConfig c;
    c.log_threshold = 4.0;
    c.runs = 400;
    c.base_seed = 7;
    c.workers = 1;
    const auto serial = run_all(*model, c);
    c.workers = 4;
    const auto parallel = run_all(*model, c);
    int mismatches = 0;
    for (std::size_t i = 0; i < serial.size(); ++i)
      mismatches += serial[i].latency != parallel[i].latency || serial[i].censored != parallel[i].censored;
    add("cusum_worker_determinism", mismatches, 0.0);
  }

  return out;
}

inline Table checks_table(const std::vector<CheckResult>& checks) {
  Table t({{"check"}, {"measured"}, {"threshold"}, {"pass"}});
  for (const auto& c : checks)
    t.add_row({c.name, c.measured, c.threshold, std::string(c.passed ? "pass" : "FAIL")});
  return t;
}

inline bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

}  // namespace qchange::cli
