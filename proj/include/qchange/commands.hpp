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
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qchange/cusum.hpp"
#include "qchange/errors.hpp"
#include "qchange/gaussian_state.hpp"
#include "qchange/io.hpp"
#include "qchange/jointcomm.hpp"
#include "qchange/models.hpp"
#include "qchange/photon_counting.hpp"
#include "qchange/qre.hpp"
#include "qchange/receivers.hpp"
#include "qchange/special_functions.hpp"
#include "qchange/table.hpp"

namespace qchange::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

/// Largest Fock photon number the sweep evaluates.
inline constexpr int kFockMaxPhotons = 100;

/// Settings shared by every subcommand; unset scenario fields fall back to the
/// command's default parameter set.
struct RunConfig {
  std::optional<double> n_bar;
  std::optional<double> n_bar_B;
  std::optional<double> eta0;
  std::optional<double> eta1;
  std::vector<double> n_bar_B_grid;  // explicit grid; empty means log-spaced
  double n_bar_B_min = 1e-5;
  double n_bar_B_max = 1.0;
  int n_bar_B_points = 21;
  int kappa_points = 21;
  int r_points = 21;
  std::vector<std::string> models;
  std::vector<double> log_gamma;
  std::vector<std::string> plugins;
  int runs = 20'000;
  std::uint64_t seed = 1;
  int workers = 0;
  std::int64_t max_steps = 1'000'000;
  std::int64_t warmup_steps = 0;
  std::string dump_runs;
  std::string mutate;
  OutputFormat format = OutputFormat::csv;
  bool bits = false;
  std::string out;

  void validate() const {
    auto finite = [](const std::optional<double>& v) { return !v || std::isfinite(*v); };
    if (!finite(n_bar) || (n_bar && *n_bar < 0.0)) throw DomainError("n_bar must be finite and >= 0");
    if (!finite(n_bar_B) || (n_bar_B && *n_bar_B < 0.0)) throw DomainError("n_bar_B must be finite and >= 0");
    if (!finite(eta0) || (eta0 && (*eta0 < 0.0 || *eta0 > 1.0))) throw DomainError("eta0 must lie in [0, 1]");
    if (!finite(eta1) || (eta1 && (*eta1 < 0.0 || *eta1 > 1.0))) throw DomainError("eta1 must lie in [0, 1]");
    for (double v : n_bar_B_grid)
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("n_bar_B_grid values must be finite and >= 0");
    if (!(n_bar_B_min > 0.0 && n_bar_B_max >= n_bar_B_min)) throw DomainError("need 0 < n_bar_B_min <= n_bar_B_max");
    if (n_bar_B_points < 1) throw DomainError("n_bar_B_points must be >= 1");
    if (kappa_points < 2) throw DomainError("kappa_points must be >= 2");
    if (r_points < 2) throw DomainError("r_points must be >= 2");
    for (double g : log_gamma)
      if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("log_gamma values must be > 0");
    if (runs < 1) throw DomainError("runs must be >= 1");
    if (workers < 0) throw DomainError("workers must be >= 0");
    if (max_steps < 1) throw DomainError("max_steps must be >= 1");
    if (warmup_steps < 0) throw DomainError("warmup_steps must be >= 0");
  }
};

/// Reads a flat JSON config; unknown keys are rejected.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("config: expected a JSON object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    auto num = [&]() {
      if (!v.is_number()) throw DomainError("config field '" + key + "' must be a number");
      return v.get<double>();
    };
    auto integer = [&]() {
      if (!v.is_number_integer()) throw DomainError("config field '" + key + "' must be an integer");
      return v.get<std::int64_t>();
    };
    auto numbers = [&]() {
      std::vector<double> out;
      if (!v.is_array()) throw DomainError("config field '" + key + "' must be an array of numbers");
      for (const auto& x : v) {
        if (!x.is_number()) throw DomainError("config field '" + key + "' must be an array of numbers");
        out.push_back(x.get<double>());
      }
      return out;
    };
    auto strings = [&]() {
      std::vector<std::string> out;
      if (!v.is_array()) throw DomainError("config field '" + key + "' must be an array of strings");
      for (const auto& x : v) {
        if (!x.is_string()) throw DomainError("config field '" + key + "' must be an array of strings");
        out.push_back(x.get<std::string>());
      }
      return out;
    };
    auto text = [&]() {
      if (!v.is_string()) throw DomainError("config field '" + key + "' must be a string");
      return v.get<std::string>();
    };
    if (key == "n_bar") c.n_bar = num();
    else if (key == "n_bar_B") c.n_bar_B = num();
    else if (key == "eta0") c.eta0 = num();
    else if (key == "eta1") c.eta1 = num();
    else if (key == "n_bar_B_grid") c.n_bar_B_grid = numbers();
    else if (key == "n_bar_B_min") c.n_bar_B_min = num();
    else if (key == "n_bar_B_max") c.n_bar_B_max = num();
    else if (key == "n_bar_B_points") c.n_bar_B_points = static_cast<int>(integer());
    else if (key == "kappa_points") c.kappa_points = static_cast<int>(integer());
    else if (key == "r_points") c.r_points = static_cast<int>(integer());
    else if (key == "models") c.models = strings();
    else if (key == "log_gamma") c.log_gamma = numbers();
    else if (key == "plugins") c.plugins = strings();
    else if (key == "runs") c.runs = static_cast<int>(integer());
    else if (key == "seed") {
      if (!v.is_number_unsigned()) throw DomainError("config field 'seed' must be a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    }
    else if (key == "workers") c.workers = static_cast<int>(integer());
    else if (key == "max_steps") c.max_steps = integer();
    else if (key == "warmup_steps") c.warmup_steps = integer();
    else if (key == "dump_runs") c.dump_runs = text();
    else if (key == "format") c.format = parse_format(text());
    else if (key == "bits") {
      if (!v.is_boolean()) throw DomainError("config field 'bits' must be a boolean");
      c.bits = v.get<bool>();
    }
    else if (key == "out") c.out = text();
    else throw DomainError("config: unknown field '" + key + "'");
  }
  return c;
}

inline RunConfig load_run_config(const std::string& path) { return run_config_from_json(io::read_json_file(path)); }

/// Scenario from the config, with per-field defaults.
inline ChangeScenario scenario_from(const RunConfig& c, const ChangeScenario& defaults) {
  ChangeScenario s{c.n_bar.value_or(defaults.n_bar), c.n_bar_B.value_or(defaults.n_bar_B),
                   c.eta0.value_or(defaults.eta0), c.eta1.value_or(defaults.eta1)};
  s.validate();
  return s;
}

inline bool scenario_overridden(const RunConfig& c) { return c.n_bar || c.n_bar_B || c.eta0 || c.eta1; }

inline std::vector<double> log_grid(double lo, double hi, int points) {
  if (points == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(points));
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (points - 1.0));
  return g;
}

inline std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1.0);
  return g;
}

inline double entropy_cell(const EntropyValue& v) {
  return v.diverged ? std::numeric_limits<double>::infinity() : v.value;
}

// Default parameter sets.
inline constexpr ChangeScenario kFig2a{5.0, 1e-4, 0.9, 0.8};
inline constexpr ChangeScenario kFig4{1e-3, 10.0, 0.9, 0.8};

/// Parameter sets of the squeezing-fraction figure.
inline std::vector<ChangeScenario> kappa_parameter_sets() {
  std::vector<ChangeScenario> out;
  for (double nb : {10.0, 1e-6})
    for (auto [e0, e1] : {std::pair{0.9, 0.8}, std::pair{0.1, 0.05}})
      for (double n : {0.1, 100.0}) out.push_back({n, nb, e0, e1});
  return out;
}

// ---------------------------------------------------------------------------

/// Closed-form QREs next to the general Gaussian formula.
inline Table cmd_qre(const RunConfig& config) {
  config.validate();
  const ChangeScenario s = scenario_from(config, kFig2a);
  Table t({{"quantity"}, {"closed_form_nats", true}, {"general_formula_nats", true}, {"rel_residual"}});
  auto row = [&](const std::string& name, const EntropyValue& closed, const GaussianState& probe) {
    const auto out = channel_outputs(probe, s);
    const EntropyValue general = gaussian_qre(out.post, out.pre);
    double residual = 0.0;
    if (closed.diverged != general.diverged)
      residual = std::numeric_limits<double>::infinity();
    else if (!closed.diverged)
      residual = std::abs(general.value - closed.value) / std::max(std::abs(closed.value), 1e-300);
    if (!closed.diverged && closed.value == 0.0 && general.value == 0.0) residual = 0.0;
    t.add_row({name, entropy_cell(closed), entropy_cell(general), residual});
  };
  row("D_TMSV", qre_tmsv(s), make_tmsv(s.n_bar));
  row("D_coh", qre_coherent(s), make_coherent(s.n_bar));
  return t;
}

/// Every transceiver's relative entropy along a grid of n̄_B.
inline Table cmd_sweep_noise(const RunConfig& config, std::ostream& log = std::cerr) {
  config.validate();
  const ChangeScenario base = scenario_from(config, kFig2a);
  const std::vector<double> grid = !config.n_bar_B_grid.empty() ? config.n_bar_B_grid
                                   : config.n_bar_B
                                       ? std::vector<double>{*config.n_bar_B}
                                       : log_grid(config.n_bar_B_min, config.n_bar_B_max, config.n_bar_B_points);
  const bool fock = is_fock_photon_number(base.n_bar) && base.n_bar <= kFockMaxPhotons;
  std::vector<Table::Column> cols{{"n_bar_B"},
                                  {"qre_tmsv", true},
                                  {"qre_coh", true},
                                  {"S_coh_hom", true},
                                  {"S_kennedy", true},
                                  {"S_ec_hom_m1", true},
                                  {"S_ec_hom_m2", true},
                                  {"S_ec_hom_m4", true},
                                  {"S_tmsv_pnr_1", true},
                                  {"S_tmsv_pnr_2", true},
                                  {"S_tmsv_pnr_inf", true},
                                  {"S_tmsv_two_pnr", true},
                                  {"S_tmsv_hom", true}};
  if (fock) cols.push_back({"S_fock_pnr", true});
  for (const char* extra : {"S_tmsv_pnr_1_series", "S_tmsv_pnr_2_series", "S_tmsv_spd_series", "S_tmsv_pnr_inf_direct",
                            "S_tmsv_pnr_inf_optnu", "S_tmsv_hom_direct"})
    cols.push_back({extra, true});
  for (const char* extra : {"nu_matched", "nu_opt", "alpha_ec_m1", "alpha_ec_m2", "alpha_ec_m4", "two_pnr_tail_mass"})
    cols.push_back({extra});
  Table t(cols);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double nb : grid) {
    const ChangeScenario s{base.n_bar, nb, base.eta0, base.eta1};
    auto cell = [&](const char* name, const std::function<double()>& f) -> double {
      try {
        return f();
      } catch (const Error& e) {
        log << "warning: n_bar_B=" << nb << " " << name << ": " << e.what() << '\n';
        return nan;
      }
    };
    std::vector<Table::Cell> row{nb};
    row.push_back(cell("qre_tmsv", [&] { return entropy_cell(qre_tmsv(s)); }));
    row.push_back(cell("qre_coh", [&] { return entropy_cell(qre_coherent(s)); }));
    row.push_back(cell("S_coh_hom", [&] { return re_coherent_homodyne(s); }));
    row.push_back(cell("S_kennedy", [&] { return entropy_cell(re_kennedy(s)); }));
    double alpha[3] = {nan, nan, nan};
    const int blocks[3] = {1, 2, 4};
    for (int i = 0; i < 3; ++i)
      row.push_back(cell("S_ec_hom", [&] {
        const auto best = optimize_alpha_ea(blocks[i], s);
        alpha[i] = best.argmax;
        return best.value;
      }));
    row.push_back(cell("S_tmsv_pnr_1", [&] { return entropy_cell(re_tmsv_pnr(s, 1).direct_lumped); }));
    row.push_back(cell("S_tmsv_pnr_2", [&] { return entropy_cell(re_tmsv_pnr(s, 2).direct_lumped); }));
    row.push_back(cell("S_tmsv_pnr_inf", [&] { return entropy_cell(re_tmsv_pnr(s, std::nullopt).series_form); }));
    double tail = nan;
    row.push_back(cell("S_tmsv_two_pnr", [&] {
      const auto r = re_two_pnr(s);
      tail = r.truncated_mass;
      return entropy_cell(r.value);
    }));
    row.push_back(cell("S_tmsv_hom", [&] { return re_tmsv_homodyne(s, HomodyneChain::matched_tms); }));
    if (fock) row.push_back(cell("S_fock_pnr", [&] { return entropy_cell(re_fock_pnr(s)); }));
    row.push_back(cell("S_tmsv_pnr_1_series", [&] { return entropy_cell(re_tmsv_pnr(s, 1).series_form); }));
    row.push_back(cell("S_tmsv_pnr_2_series", [&] { return entropy_cell(re_tmsv_pnr(s, 2).series_form); }));
    row.push_back(cell("S_tmsv_spd_series", [&] { return entropy_cell(re_tmsv_spd(s)); }));
    row.push_back(cell("S_tmsv_pnr_inf_direct", [&] {
      const auto r = tmsv_pnr_rates_at(s, 0.0);
      return entropy_cell(pnr_entropy_infinite(r.q0, r.q1));
    }));
    double nu_opt = nan;
    row.push_back(cell("S_tmsv_pnr_inf_optnu", [&] {
      const auto o = optimize_pnr_squeezer(s);
      nu_opt = o.nu;
      return entropy_cell(o.value);
    }));
    row.push_back(cell("S_tmsv_hom_direct", [&] { return re_tmsv_homodyne(s, HomodyneChain::direct); }));
    row.push_back(cell("nu_matched", [&] { return tmsv_output_standard_form(s.n_bar, s.eta0, s.n_bar_B).nu; }));
    row.push_back(nu_opt);
    for (double a : alpha) row.push_back(a);
    row.push_back(tail);
    t.add_row(std::move(row));
  }
  return t;
}

/// QRE of the displaced TMSV against the squeezing fraction κ.
inline Table cmd_kappa_sweep(const RunConfig& config) {
  config.validate();
  const std::vector<ChangeScenario> sets =
      scenario_overridden(config) ? std::vector<ChangeScenario>{scenario_from(config, kappa_parameter_sets().front())}
                                  : kappa_parameter_sets();
  Table t({{"n_bar"}, {"n_bar_B"}, {"eta0"}, {"eta1"}, {"kappa"}, {"D_nats", true}, {"D_normalized"},
           {"dD_dkappa_nats", true}});
  const auto grid = linear_grid(0.0, 1.0, config.kappa_points);
  for (const auto& s : sets) {
    const KappaSweep sweep = kappa_qre_sweep(s, grid);
    for (const auto& p : sweep.points)
      t.add_row({s.n_bar, s.n_bar_B, s.eta0, s.eta1, p.kappa, entropy_cell(p.qre), p.normalized, p.derivative});
  }
  return t;
}

/// Capacity and mixture relative entropy along the squeezing grid, plus plug-in channels.
inline Table cmd_tradeoff(const RunConfig& config) {
  config.validate();
  const ChangeScenario s = scenario_from(config, kFig4);
  Table t({{"scheme"}, {"parameter"}, {"value"}, {"displacement_energy"}, {"capacity_nats", true}, {"re_nats", true},
           {"capacity_max"}});
  const auto r_grid = default_r_grid(s.n_bar, config.r_points);
  for (auto kind : {ModulationKind::bpsk, ModulationKind::gaussian_mod}) {
    const TradeoffCurve curve = tradeoff_sweep(kind, s, r_grid);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      const auto& p = curve.points[i];
      t.add_row({p.scheme, std::string("r"), p.r, p.displacement_energy, p.capacity, p.re,
                 std::int64_t{i == curve.capacity_argmax}});
    }
    const auto opt = tradeoff_point(kind, s, curve.continuous_optimum.argmax);
    t.add_row({std::string(to_string(kind)) + ":continuous_opt", std::string("r"), opt.r, opt.displacement_energy,
               opt.capacity, opt.re, std::int64_t{0}});
  }
  for (const auto& path : config.plugins) {
    const PluginChannel channel = io::load_plugin_channel(path);
    const CapacityResult cap = plugin_capacity(channel);
    const EntropyValue re = plugin_mixture_re(channel);
    const std::string tag = "plugin:" + std::filesystem::path(path).stem().string();
    t.add_row({tag, std::string("prior"), std::string("optimal"), std::numeric_limits<double>::quiet_NaN(), cap.capacity, entropy_cell(re),
               std::int64_t{0}});
    t.add_row({tag, std::string("prior"), std::string("file"), std::numeric_limits<double>::quiet_NaN(), cap.fixed_prior_mi, entropy_cell(re),
               std::int64_t{0}});
  }
  return t;
}

/// Monte Carlo CUSUM latency for each model and threshold.
inline Table cmd_cusum(const RunConfig& config) {
  config.validate();
  const ChangeScenario s = scenario_from(config, kFig4);
  const std::vector<std::string> models =
      config.models.empty() ? std::vector<std::string>{"mixture_bpsk_homodyne", "mixture_gaussian_homodyne"}
                            : config.models;
  const std::vector<double> gammas = config.log_gamma.empty() ? std::vector<double>{6.0, 9.0, 12.0} : config.log_gamma;
  Table t({{"model"}, {"ln_gamma"}, {"mean_latency"}, {"stderr"}, {"theoretical"}, {"S_nats", true}, {"censored"},
           {"runs"}});
  for (const auto& m : models) {
    const ModelPtr model = make_model(ModelSpec::parse(m), s);
    for (double g : gammas) {
      CusumConfig cc;
      cc.log_threshold = g;
      cc.runs = config.runs;
      cc.base_seed = config.seed;
      cc.workers = config.workers;
      cc.max_steps = config.max_steps;
      cc.warmup_steps = config.warmup_steps;
      const auto outcomes = run_all(*model, cc);
      const LatencyEstimate est = summarize(outcomes);
      const double theory = model->re() > 0.0 && !model->divergent() ? theoretical_latency(model->re(), g)
                                                                     : std::numeric_limits<double>::quiet_NaN();
      t.add_row({model->name(), g, est.mean, est.stderr_, theory, model->divergent() ? std::numeric_limits<double>::infinity() : model->re(),
                 std::int64_t{est.censored_count}, std::int64_t{est.runs}});
      if (!config.dump_runs.empty()) {
        std::filesystem::create_directories(config.dump_runs);
        std::string stem = model->name();
        for (char& ch : stem)
          if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') ch = '_';
        std::ofstream dump(std::filesystem::path(config.dump_runs) / fmt::format("{}_lng{}.csv", stem, g));
        write_run_dump(dump, outcomes);
      }
    }
  }
  return t;
}

}  // namespace qchange::cli
