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

#include <cmath>
#include <sstream>

#include "qchange/cusum.hpp"
#include "qchange/pmf.hpp"

using namespace qchange;

namespace {

ModelPtr shift_model() {
  return std::make_shared<NormalPairModel>("shift", GaussianChannelLaw{1.0, 1.0}, GaussianChannelLaw{0.0, 1.0});
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(Seeding, SplitmixReferenceValue) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  Rng a = run_rng(1, 0), b = run_rng(1, 1), c = run_rng(1, 0);
  EXPECT_NE(a(), b());
  EXPECT_EQ(run_rng(1, 0)(), c());
}

TEST(Recursion, Update) {
  EXPECT_EQ(cusum_update(0.0, -1.0), 0.0);
  EXPECT_EQ(cusum_update(2.0, 0.5), 2.5);
  EXPECT_THROW(cusum_update(NAN, 0.1), NumericError);
  EXPECT_THROW(cusum_update(-1.0, 0.1), DomainError);
}

TEST(Models, NormalPairLlrAndSelfCheck) {
  const auto m = shift_model();
  EXPECT_NEAR(m->re(), 0.5, 1e-15);
  const auto& pair = dynamic_cast<const NormalPairModel&>(*m);
  EXPECT_NEAR(pair.llr(0.5), 0.0, 1e-15);
  EXPECT_NEAR(pair.llr(2.0), 1.5, 1e-15);
  EXPECT_TRUE(m->self_check().passed);
}

TEST(Models, MixtureSelfCheck) {
  NormalMixture post{{0.5, 0.5}, {0.8, -0.8}, 0.3}, pre{{0.5, 0.5}, {1.0, -1.0}, 0.3};
  NormalMixtureModel m("mix", post, pre);
  const auto check = m.self_check(200000, 42);
  EXPECT_TRUE(check.passed);
  EXPECT_NEAR(check.mean, m.re(), 4 * check.stderr_);
}

TEST(Models, DiscreteModelCoarseGrainsToCommonSupport) {
  const auto post = thermal_pmf(2.0), pre = thermal_pmf(0.5);
  ASSERT_GT(post.cutoff(), pre.cutoff());
  DiscreteModel m("geom", post, pre);
  EXPECT_FALSE(m.divergent());
  EXPECT_NEAR(m.llr(0), std::log(1 / 3.0) - std::log(1 / 1.5), 1e-12);
  // the coarse-grained divergence is a lower bound converging to the full value
  const double full = 2.0 * std::log(2.0 / 0.5) + 3.0 * std::log(1.5 / 3.0);
  EXPECT_LE(m.re(), full + 1e-12);
  EXPECT_GT(m.re(), 0.9 * full);
  EXPECT_TRUE(m.self_check().passed);
}

TEST(Models, DiscreteSupportMismatchIsDivergent) {
  DiscreteModel m("mismatch", DiscretePmf({0.5, 0.5}, 0.0), DiscretePmf({1.0, 0.0}, 0.0));
  EXPECT_TRUE(m.divergent());
  EXPECT_TRUE(std::isinf(m.llr(1)));
  CusumConfig c;
  c.runs = 200;
  c.log_threshold = 50.0;
  const auto est = estimate_latency(m, c);
  EXPECT_GE(est.mean, 1.0);
  EXPECT_LT(est.mean, 3.0);
}

TEST(MonteCarlo, DeterministicAcrossWorkers) {
  const auto m = shift_model();
  CusumConfig c;
  c.log_threshold = 6.0;
  c.runs = 2000;
  c.base_seed = 123;
  c.workers = 1;
  const auto a = run_all(*m, c);
  c.workers = 3;
  const auto b = run_all(*m, c);
  c.workers = 8;
  const auto d = run_all(*m, c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].latency, b[i].latency);
    EXPECT_EQ(a[i].latency, d[i].latency);
  }
  c.base_seed = 124;
  const auto e = run_all(*m, c);
  int differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += a[i].latency != e[i].latency;
  EXPECT_GT(differ, 100);
}

TEST(MonteCarlo, LatencyGrowsAsLogThresholdOverS) {
  const auto m = shift_model();
  std::vector<double> x, y;
  for (double g : {5.0, 10.0, 15.0}) {
    CusumConfig c;
    c.log_threshold = g;
    c.runs = 5000;
    const auto est = estimate_latency(*m, c);
    EXPECT_GT(est.mean, theoretical_latency(m->re(), g));
    EXPECT_EQ(est.censored_count, 0);
    x.push_back(g);
    y.push_back(est.mean);
  }
  EXPECT_NEAR(slope(x, y), 1.0 / m->re(), 0.05 / m->re());
}

TEST(MonteCarlo, WarmupRaisesFalseAlarmsAtLowThreshold) {
  const auto m = shift_model();
  CusumConfig c;
  c.log_threshold = 1.0;
  c.runs = 50;
  c.warmup_steps = 500;
  const auto est = estimate_latency(*m, c);
  EXPECT_GT(est.false_alarms, 0);
}

TEST(MonteCarlo, CensoringAndSummary) {
  const auto m = shift_model();
  CusumConfig c;
  c.log_threshold = 1e6;
  c.max_steps = 10;
  c.runs = 5;
  const auto outcomes = run_all(*m, c);
  for (const auto& o : outcomes) {
    EXPECT_TRUE(o.censored);
    EXPECT_EQ(o.latency, 10);
  }
  EXPECT_THROW(summarize(outcomes), NumericError);
  const std::vector<RunOutcome> hand{{2, false, 0}, {4, false, 1}, {9, true, 0}};
  const auto est = summarize(hand);
  EXPECT_EQ(est.mean, 3.0);
  EXPECT_NEAR(est.stderr_, 1.0, 1e-15);
  EXPECT_EQ(est.censored_count, 1);
  EXPECT_EQ(est.false_alarms, 1);
  std::ostringstream os;
  write_run_dump(os, hand);
  EXPECT_EQ(os.str(), "run_index,latency,censored\n0,2,0\n1,4,0\n2,9,1\n");
}

TEST(MonteCarlo, ConfigValidation) {
  CusumConfig c;
  c.runs = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.log_threshold = -1;
  EXPECT_THROW(c.validate(), DomainError);
  EXPECT_THROW(theoretical_latency(0.0, 5.0), DomainError);
}
