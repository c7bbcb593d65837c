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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qchange/commands.hpp"
#include "qchange/validation.hpp"

namespace {

using namespace qchange;
using namespace qchange::cli;

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> workers;
  bool bits = false;
  std::optional<double> n_bar, n_bar_B, eta0, eta1;
  std::vector<std::string> models;
  std::vector<double> log_gamma;
  std::vector<std::string> plugins;
  std::optional<std::string> dump_runs;
  std::string mutate;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "flat JSON config; flags override its values")->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output file (default stdout)");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--runs", f.runs, "Monte Carlo runs per threshold");
  cmd->add_flag("--bits", f.bits, "report entropy columns in bits instead of nats");
  cmd->add_option("--n-bar", f.n_bar, "mean probe photon number");
  cmd->add_option("--n-bar-B", f.n_bar_B, "thermal noise photon number");
  cmd->add_option("--eta0", f.eta0, "prechange transmittance");
  cmd->add_option("--eta1", f.eta1, "postchange transmittance");
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  if (f.out) c.out = *f.out;
  if (f.format) c.format = parse_format(*f.format);
  if (f.seed) c.seed = *f.seed;
  if (f.runs) c.runs = *f.runs;
  if (f.workers) c.workers = *f.workers;
  if (f.bits) c.bits = true;
  if (f.n_bar) c.n_bar = f.n_bar;
  if (f.n_bar_B) c.n_bar_B = f.n_bar_B;
  if (f.eta0) c.eta0 = f.eta0;
  if (f.eta1) c.eta1 = f.eta1;
  if (!f.models.empty()) c.models = f.models;
  if (!f.log_gamma.empty()) c.log_gamma = f.log_gamma;
  if (!f.plugins.empty()) c.plugins = f.plugins;
  if (f.dump_runs) c.dump_runs = *f.dump_runs;
  c.mutate = f.mutate;
  c.validate();
  return c;
}

void emit(const Table& table, const RunConfig& c) {
  if (c.out.empty()) {
    table.write(std::cout, c.format, c.bits);
    std::cout.flush();
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw DomainError("cannot open output file '" + c.out + "'");
  table.write(file, c.format, c.bits);
}

constexpr const char* kQreHelp =
    "Columns: quantity, closed_form_nats, general_formula_nats, rel_residual.\n"
    "Defaults: n_bar=5, n_bar_B=1e-4, eta0=0.9, eta1=0.8.";
constexpr const char* kSweepHelp =
    "Columns: n_bar_B, qre_tmsv, qre_coh, S_coh_hom, S_kennedy, S_ec_hom_m1, S_ec_hom_m2, S_ec_hom_m4,\n"
    "S_tmsv_pnr_1, S_tmsv_pnr_2, S_tmsv_pnr_inf, S_tmsv_two_pnr, S_tmsv_hom, S_fock_pnr (integer n_bar <= 100),\n"
    "then S_tmsv_pnr_1_series, S_tmsv_pnr_2_series, S_tmsv_spd_series, S_tmsv_pnr_inf_direct, S_tmsv_pnr_inf_optnu,\n"
    "S_tmsv_hom_direct, nu_matched, nu_opt, alpha_ec_m1, alpha_ec_m2, alpha_ec_m4, two_pnr_tail_mass.\n"
    "S_tmsv_pnr_1/2 are lumped-bin divergences; the *_series columns use the series form.\n"
    "Failed cells are NaN with a warning on stderr. Grid: 21 log-spaced n_bar_B in [1e-5, 1] unless configured.";
constexpr const char* kKappaHelp =
    "Columns: n_bar, n_bar_B, eta0, eta1, kappa, D_nats, D_normalized, dD_dkappa_nats.\n"
    "Without scenario flags all eight parameter sets are swept.";
constexpr const char* kTradeoffHelp =
    "Columns: scheme, parameter, value, displacement_energy, capacity_nats, re_nats, capacity_max.\n"
    "capacity_max marks the grid argmax per family; <scheme>:continuous_opt rows give the optimum over r.\n"
    "Plugin rows report the optimal-prior capacity and the file-prior mutual information.\n"
    "Defaults: n_bar=1e-3, n_bar_B=10, eta0=0.9, eta1=0.8.";
constexpr const char* kCusumHelp =
    "Columns: model, ln_gamma, mean_latency, stderr, theoretical, S_nats, censored, runs.\n"
    "Models: squeezed_coherent_homodyne[:alpha], kennedy, tmsv_pnr[:l|inf], tmsv_two_pnr, tmsv_homodyne[:direct],\n"
    "fock_pnr, mixture_bpsk_homodyne[:r], mixture_gaussian_homodyne[:r], plugin_pmf:PATH.\n"
    "Defaults: the two mixture models at n_bar=1e-3, n_bar_B=10, eta=(0.9, 0.8), ln_gamma 6 9 12, 20000 runs.";
constexpr const char* kValidateHelp = "Columns: check, measured, threshold, pass. Exit 0 iff every check passes.";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quickest detection of transmittance changes with quantum probes"};
  app.require_subcommand(1);
  Flags f;

  auto* qre = app.add_subcommand("qre", "closed-form relative entropies with general-formula residuals");
  auto* sweep = app.add_subcommand("sweep-noise", "receiver relative entropies versus thermal noise");
  auto* kappa = app.add_subcommand("kappa-sweep", "displaced-TMSV relative entropy versus squeezing fraction");
  auto* tradeoff = app.add_subcommand("tradeoff", "capacity and relative entropy versus squeezing");
  auto* cusum = app.add_subcommand("cusum", "Monte Carlo CUSUM detection latency");
  auto* validate = app.add_subcommand("validate", "run the invariant suite");
  for (auto* cmd : {qre, sweep, kappa, tradeoff, cusum, validate}) add_common(cmd, f);
  qre->footer(kQreHelp);
  sweep->footer(kSweepHelp);
  kappa->footer(kKappaHelp);
  tradeoff->footer(kTradeoffHelp);
  cusum->footer(kCusumHelp);
  validate->footer(kValidateHelp);
  tradeoff->add_option("--plugin", f.plugins, "plugin channel JSON file")->check(CLI::ExistingFile);
  cusum->add_option("--model", f.models, "model spec, repeatable");
  cusum->add_option("--log-gamma", f.log_gamma, "CUSUM log thresholds");
  cusum->add_option("--workers", f.workers, "worker threads (0 = hardware concurrency)");
  cusum->add_option("--dump-runs", f.dump_runs, "directory for per-run latency CSVs");
  validate->add_option("--mutate", f.mutate, "perturb one closed-form reference")
      ->check(CLI::IsMember(mutation_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    const RunConfig c = resolve(f);
    if (qre->parsed()) emit(cmd_qre(c), c);
    if (sweep->parsed()) emit(cmd_sweep_noise(c), c);
    if (kappa->parsed()) emit(cmd_kappa_sweep(c), c);
    if (tradeoff->parsed()) emit(cmd_tradeoff(c), c);
    if (cusum->parsed()) emit(cmd_cusum(c), c);
    if (validate->parsed()) {
      const auto checks = run_checks(c.mutate);
      emit(checks_table(checks), c);
      return all_passed(checks) ? kExitOk : kExitCheckFailed;
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
