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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qchange/commands.hpp"
#include "qchange/validation.hpp"

using namespace qchange;
using namespace qchange::cli;
namespace fs = std::filesystem;

namespace {

std::string render(const Table& t, OutputFormat f = OutputFormat::csv, bool bits = false) {
  std::ostringstream os;
  t.write(os, f, bits);
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qchange_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  const fs::path capture = scratch("stdout.txt");
  const std::string cmd = std::string(QCHANGE_CLI_PATH) + " " + args + " > " + capture.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(capture);
    *out = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesFlatJson) {
  const auto c = run_config_from_json(nlohmann::json::parse(
      R"({"n_bar": 2, "n_bar_B_grid": [0.1, 1], "models": ["kennedy"], "runs": 50, "seed": 9, "format": "json",
          "bits": true})"));
  EXPECT_EQ(*c.n_bar, 2.0);
  EXPECT_EQ(c.n_bar_B_grid.size(), 2u);
  EXPECT_EQ(c.models.front(), "kennedy");
  EXPECT_EQ(c.runs, 50);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.format, OutputFormat::json);
  EXPECT_TRUE(c.bits);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"nbar": 2})")), DomainError);
  EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"runs": "many"})")), DomainError);
  EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"seed": -3})")), DomainError);
  EXPECT_THROW(run_config_from_json(nlohmann::json::parse("[1]")), DomainError);
  RunConfig c;
  c.eta0 = 1.5;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.log_gamma = {0.0};
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(TableOutput, CsvAndJson) {
  Table t({{"name"}, {"d_nats", true}, {"count"}});
  t.add_row({std::string("a,b"), 0.5, std::int64_t{3}});
  t.add_row({std::string("c"), std::numeric_limits<double>::infinity(), std::int64_t{0}});
  EXPECT_EQ(render(t), "name,d_nats,count\n\"a,b\",0.5,3\nc,inf,0\n");
  const std::string bits = render(t, OutputFormat::csv, true);
  EXPECT_NE(bits.find("d_bits"), std::string::npos);
  EXPECT_NE(bits.find(fmt::format("{:.17g}", 0.5 / std::log(2.0))), std::string::npos);
  const auto j = nlohmann::json::parse(render(t, OutputFormat::json));
  EXPECT_EQ(j["units"], "nats");
  EXPECT_EQ(j["rows"][0]["name"], "a,b");
  EXPECT_EQ(j["rows"][1]["d_nats"], "inf");
  EXPECT_THROW(t.add_row({0.1}), DomainError);
  EXPECT_THROW(parse_format("xml"), DomainError);
}

TEST(Commands, QreResidualsAndZeros) {
  const Table t = cmd_qre({});
  ASSERT_EQ(t.rows().size(), 2u);
  EXPECT_LT(t.number(0, "rel_residual"), 1e-8);
  EXPECT_LT(t.number(1, "rel_residual"), 1e-8);
  RunConfig same;
  same.eta0 = 0.7;
  same.eta1 = 0.7;
  const Table z = cmd_qre(same);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_EQ(z.number(r, "closed_form_nats"), 0.0);
    EXPECT_EQ(z.number(r, "general_formula_nats"), 0.0);
    EXPECT_EQ(z.number(r, "rel_residual"), 0.0);
  }
}

TEST(Commands, SweepNoiseColumnsAndDataProcessing) {
  RunConfig c;
  c.n_bar_B_points = 5;
  const Table t = cmd_sweep_noise(c);
  ASSERT_EQ(t.rows().size(), 5u);
  EXPECT_NO_THROW(t.column_index("S_fock_pnr"));
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    const double coh = t.number(r, "qre_coh"), tms = t.number(r, "qre_tmsv");
    for (const char* col : {"S_coh_hom", "S_kennedy"}) EXPECT_LE(t.number(r, col), coh + 1e-9) << col;
    for (const char* col : {"S_tmsv_pnr_1", "S_tmsv_pnr_2", "S_tmsv_pnr_inf", "S_tmsv_two_pnr", "S_tmsv_hom"})
      EXPECT_LE(t.number(r, col), tms + 1e-9) << col;
  }
  EXPECT_GT(t.number(0, "qre_tmsv"), t.number(0, "qre_coh"));
  c.n_bar = 5.5;
  EXPECT_THROW(cmd_sweep_noise(c).column_index("S_fock_pnr"), DomainError);
}

TEST(Commands, SweepNoiseIsDeterministic) {
  RunConfig c;
  c.n_bar_B_grid = {1e-3, 0.5};
  EXPECT_EQ(render(cmd_sweep_noise(c)), render(cmd_sweep_noise(c)));
}

TEST(Commands, KappaSweepCoversEightSets) {
  const Table t = cmd_kappa_sweep({});
  EXPECT_EQ(t.rows().size(), 8u * 21u);
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    const double k = t.number(r, "kappa");
    if (k > 0.0 && k < 1.0) EXPECT_GT(t.number(r, "dD_dkappa_nats"), 0.0);
  }
  RunConfig one;
  one.n_bar = 2.0;
  EXPECT_EQ(cmd_kappa_sweep(one).rows().size(), 21u);
}

TEST(Commands, TradeoffMarksZeroSqueezing) {
  RunConfig c;
  c.plugins = {std::string(QCHANGE_SAMPLES_DIR) + "/plugin_channel.json"};
  const Table t = cmd_tradeoff(c);
  const auto scheme = t.column_index("scheme");
  int plugin_rows = 0;
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    const auto& name = std::get<std::string>(t.rows()[r][scheme]);
    if (t.number(r, "capacity_max") == 1) EXPECT_EQ(t.number(r, "value"), 0.0) << name;
    plugin_rows += name.rfind("plugin:", 0) == 0;
  }
  EXPECT_EQ(plugin_rows, 2);
}

TEST(Commands, CusumByteIdenticalAcrossWorkers) {
  RunConfig c;
  c.runs = 500;
  c.log_gamma = {3.0, 6.0};
  c.workers = 1;
  const std::string one = render(cmd_cusum(c));
  c.workers = 4;
  EXPECT_EQ(render(cmd_cusum(c)), one);
  c.seed = 2;
  EXPECT_NE(render(cmd_cusum(c)), one);
}

TEST(Commands, CusumDumpsRuns) {
  RunConfig c;
  c.runs = 20;
  c.log_gamma = {2.0};
  c.models = {"coherent_homodyne"};
  c.n_bar = 5.0;
  c.n_bar_B = 0.1;
  c.dump_runs = scratch("dump").string();
  fs::remove_all(c.dump_runs);
  cmd_cusum(c);
  int files = 0;
  for (const auto& e : fs::directory_iterator(c.dump_runs)) {
    ++files;
    std::ifstream in(e.path());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "run_index,latency,censored");
  }
  EXPECT_EQ(files, 1);
}

TEST(Models, EveryKindBuildsAndSelfChecks) {
  const ChangeScenario s{5.0, 0.1, 0.9, 0.8};
  for (const char* spec : {"coherent_homodyne", "squeezed_coherent_homodyne", "squeezed_coherent_homodyne:1.5",
                           "kennedy", "tmsv_pnr", "tmsv_pnr:1", "tmsv_pnr:2", "tmsv_two_pnr", "tmsv_homodyne",
                           "tmsv_homodyne:direct", "fock_pnr", "mixture_bpsk_homodyne",
                           "mixture_gaussian_homodyne:0.2"}) {
    const ModelPtr m = make_model(ModelSpec::parse(spec), s);
    EXPECT_EQ(m->name(), spec);
    EXPECT_GT(m->re(), 0.0) << spec;
    EXPECT_TRUE(m->self_check(20000).passed) << spec;
  }
  EXPECT_NEAR(make_model(ModelSpec::parse("tmsv_pnr"), s)->re(), re_tmsv_pnr(s, std::nullopt).series_form.value, 1e-9);
  EXPECT_NEAR(make_model(ModelSpec::parse("tmsv_pnr:2"), s)->re(), re_tmsv_pnr(s, 2).direct_lumped.value, 1e-12);
  EXPECT_THROW(make_model(ModelSpec::parse("laser"), s), DomainError);
  EXPECT_THROW(make_model(ModelSpec::parse("tmsv_homodyne:sideways"), s), DomainError);
  EXPECT_THROW(make_model(ModelSpec::parse("fock_pnr"), {5.5, 0.1, 0.9, 0.8}), DomainError);
}

TEST(Io, PluginChannelRoundTrip) {
  const PluginChannel c = io::load_plugin_channel(std::string(QCHANGE_SAMPLES_DIR) + "/plugin_channel.json");
  const PluginChannel back = io::plugin_channel_from_json(io::to_json(c));
  EXPECT_EQ(back.pre, c.pre);
  EXPECT_EQ(back.post, c.post);
  EXPECT_EQ(back.labels_y, c.labels_y);
  const ModelPtr m = make_model(ModelSpec::parse("plugin_pmf:" + std::string(QCHANGE_SAMPLES_DIR) +
                                                 "/plugin_channel.json"),
                                {1.0, 1.0, 0.9, 0.8});
  EXPECT_NEAR(m->re(), plugin_mixture_re(c).value, 1e-15);
  EXPECT_THROW(io::plugin_channel_from_json(nlohmann::json::parse(R"({"prior": [1], "pre": [[1]]})")), DomainError);
}

TEST(Io, GaussianStateRoundTrip) {
  const auto st = apply_lossy_thermal(make_tmsv(2.0), 0, 0.5, 0.3);
  const auto back = io::gaussian_state_from_json(io::to_json(st));
  EXPECT_EQ(back.cov(), st.cov());
  EXPECT_EQ(back.mean(), st.mean());
}

TEST(Validate, AllChecksPassAndMutationsAreCaught) {
  const auto checks = run_checks();
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << " " << c.measured;
  EXPECT_GE(checks.size(), 15u);
  for (const auto& name : mutation_names()) EXPECT_FALSE(all_passed(run_checks(name))) << name;
  EXPECT_THROW(run_checks("nothing"), DomainError);
}

TEST(Binary, ExitCodes) {
  std::string out;
  EXPECT_EQ(run_cli("qre", &out), 0);
  EXPECT_EQ(out.rfind("quantity,closed_form_nats", 0), 0u);
  EXPECT_EQ(run_cli("qre --eta0 1.5"), 2);
  EXPECT_EQ(run_cli("qre --format xml"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("cusum --runs 10 --model tmsv_pnr:0"), 2);
  EXPECT_EQ(run_cli("validate"), 0);
  EXPECT_EQ(run_cli("validate --mutate spd_formula"), 1);
}

TEST(Binary, NumericFailureExitsThree) {
  // every run censored: the latency estimate is undefined
  const fs::path cfg = scratch("censored.json");
  std::ofstream(cfg) << R"({"runs": 5, "max_steps": 1, "log_gamma": [50]})";
  EXPECT_EQ(run_cli("cusum --config " + cfg.string()), 3);
}

TEST(Binary, ConfigFileAndOutputPath) {
  const fs::path cfg = scratch("qre.json"), out = scratch("qre.json.out");
  std::ofstream(cfg) << R"({"n_bar": 1.0, "n_bar_B": 0.5})";
  fs::remove(out);
  EXPECT_EQ(run_cli("qre --config " + cfg.string() + " --format json --out " + out.string()), 0);
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(run_cli("qre --config " + scratch("missing.json").string()), 2);
}
