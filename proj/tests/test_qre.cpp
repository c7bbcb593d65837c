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
#include <vector>

#include "qchange/qre.hpp"

using namespace qchange;

namespace {

std::vector<ChangeScenario> grid() {
  std::vector<ChangeScenario> out;
  const std::pair<double, double> etas[] = {{0.9, 0.8}, {0.5, 0.4}, {0.99, 0.9}, {0.3, 0.1}, {0.8, 0.79}};
  for (double n : {0.1, 1.0, 5.0, 50.0, 400.0})
    for (double nb : {1e-4, 1e-3, 1e-2, 1e-1, 1.0})
      for (auto [e0, e1] : etas) out.push_back({n, nb, e0, e1});
  return out;
}

double general(const GaussianState& probe, const ChangeScenario& s) {
  const auto out = channel_outputs(probe, s);
  return gaussian_qre(out.post, out.pre).value;
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

TEST(ClosedForm, TmsvMatchesGeneralFormulaOnGrid) {
  for (const auto& s : grid()) {
    const double closed = qre_tmsv(s).value;
    EXPECT_NEAR(general(make_tmsv(s.n_bar), s), closed, 1e-8 * closed)
        << s.n_bar << " " << s.n_bar_B << " " << s.eta0 << " " << s.eta1;
  }
}

TEST(ClosedForm, CoherentMatchesGeneralFormulaOnGrid) {
  for (const auto& s : grid()) {
    const double closed = qre_coherent(s).value;
    EXPECT_NEAR(general(make_coherent(s.n_bar), s), closed, 1e-8 * closed)
        << s.n_bar << " " << s.n_bar_B << " " << s.eta0 << " " << s.eta1;
  }
}

TEST(ClosedForm, FrozenValues) {
  const ChangeScenario s{5.0, 1.0, 0.9, 0.8};
  EXPECT_NEAR(qre_tmsv(s).value, 0.3205653, 1e-6);
  EXPECT_NEAR(qre_coherent(s).value, 0.0695095, 1e-6);
  const ChangeScenario low{5.0, 1e-4, 0.9, 0.8};
  EXPECT_NEAR(qre_tmsv(low).value, 0.77870937853, 1e-9);
  EXPECT_NEAR(qre_coherent(low).value, 0.16945845142, 1e-9);
}

TEST(ClosedForm, IdenticalChannelsGiveZero) {
  EXPECT_EQ(qre_tmsv({5.0, 0.1, 0.7, 0.7}).value, 0.0);
  EXPECT_EQ(qre_coherent({5.0, 0.1, 0.7, 0.7}).value, 0.0);
}

TEST(ClosedForm, VacuumProbeSeesOnlyTheThermalChange) {
  const ChangeScenario s{0.0, 0.1, 0.9, 0.2};
  EXPECT_GT(qre_tmsv(s).value, 0.0);
  EXPECT_NEAR(qre_tmsv(s).value, qre_coherent(s).value, 1e-12);
  const auto thermal = [&](double eta) { return apply_lossy_thermal(GaussianState::vacuum(1), 0, eta, s.n_bar_B); };
  EXPECT_NEAR(qre_coherent(s).value, gaussian_qre(thermal(s.eta1), thermal(s.eta0)).value, 1e-10);
}

TEST(ClosedForm, NoiselessChannelDiverges) {
  EXPECT_TRUE(qre_coherent({5.0, 0.0, 0.9, 0.8}).diverged);
  EXPECT_TRUE(qre_tmsv({5.0, 0.0, 0.9, 0.8}).diverged);
}

TEST(ClosedForm, ValidatesScenario) {
  EXPECT_THROW(qre_tmsv({5.0, 0.1, 1.5, 0.8}), DomainError);
  EXPECT_THROW(qre_coherent({-1.0, 0.1, 0.9, 0.8}), DomainError);
  EXPECT_THROW(qre_coherent({1.0, NAN, 0.9, 0.8}), DomainError);
}

TEST(ClosedForm, TmsvBeatsCoherentAtLowNoise) {
  for (double nb : {1e-6, 1e-4, 1e-2}) {
    const ChangeScenario s{5.0, nb, 0.9, 0.8};
    EXPECT_GT(qre_tmsv(s).value, qre_coherent(s).value);
  }
}

TEST(LowNoise, SlopesMatchCoefficients) {
  const ChangeScenario base{5.0, 0.0, 0.9, 0.8};
  std::vector<double> x, coh, tms;
  for (int i = 0; i <= 8; ++i) {
    const double nb = std::pow(10.0, -10.0 + 0.5 * i);
    x.push_back(-std::log(nb));
    coh.push_back(qre_coherent({base.n_bar, nb, base.eta0, base.eta1}).value);
    tms.push_back(qre_tmsv({base.n_bar, nb, base.eta0, base.eta1}).value);
  }
  const auto c = lownoise_coefficients(base.n_bar, base.eta0, base.eta1);
  EXPECT_NEAR(slope(x, coh), c.coh_coeff, 1e-2 * c.coh_coeff);
  EXPECT_NEAR(slope(x, tms), c.tmsv_coeff, 1e-2 * c.tmsv_coeff);
  EXPECT_NEAR(c.ratio, 4.0, 1e-12);
  EXPECT_NEAR(c.tmsv_coeff / c.coh_coeff, c.ratio, 1e-12);
}

TEST(LowNoise, RatioApproachesLimitSlowly) {
  const ChangeScenario a{5.0, 1e-10, 0.9, 0.8}, b{5.0, 1e-100, 0.9, 0.8};
  const double ra = qre_tmsv(a).value / qre_coherent(a).value;
  const double rb = qre_tmsv(b).value / qre_coherent(b).value;
  EXPECT_GT(ra, rb);
  EXPECT_GT(rb, 4.0);
  EXPECT_LT(rb - 4.0, ra - 4.0);
}

TEST(LinearRegime, CoefficientAttained) {
  const ChangeScenario s{1e6, 1.0, 0.9, 0.8};
  const double c = tmsv_linear_coefficient(s.n_bar_B, s.eta0, s.eta1);
  EXPECT_NEAR(qre_tmsv(s).value / s.n_bar, c, 1e-2 * c);
  EXPECT_THROW(tmsv_linear_coefficient(0.0, 0.9, 0.8), DomainError);
}

TEST(Kappa, EndpointsAndDerivative) {
  const std::vector<ChangeScenario> sets{{0.1, 10, 0.9, 0.8},  {100, 10, 0.9, 0.8},   {0.1, 10, 0.1, 0.05},
                                         {100, 10, 0.1, 0.05}, {0.1, 1e-6, 0.9, 0.8}, {100, 1e-6, 0.9, 0.8},
                                         {0.1, 1e-6, 0.1, 0.05}, {100, 1e-6, 0.1, 0.05}};
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  for (const auto& s : sets) {
    const auto sweep = kappa_qre_sweep(s, grid);
    ASSERT_EQ(sweep.points.size(), grid.size());
    EXPECT_FALSE(sweep.diverged);
    EXPECT_EQ(sweep.points.front().normalized, 0.0);
    EXPECT_EQ(sweep.points.back().normalized, 1.0);
    EXPECT_NEAR(sweep.points.back().qre.value, qre_tmsv(s).value, 1e-7 * qre_tmsv(s).value);
    EXPECT_NEAR(sweep.points.front().qre.value, qre_coherent(s).value, 1e-7 * qre_coherent(s).value);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) EXPECT_GT(sweep.points[i].derivative, 0.0);
  }
}

TEST(Kappa, DerivativeMatchesSecantOfSweep) {
  const ChangeScenario s{5.0, 0.01, 0.9, 0.8};
  const double h = 1e-3;
  const double central = (displaced_tmsv_qre(s, 0.5 + h).value - displaced_tmsv_qre(s, 0.5 - h).value) / (2 * h);
  const auto sweep = kappa_qre_sweep(s, {0.0, 0.5, 1.0});
  EXPECT_NEAR(sweep.points[1].derivative, central, 1e-5 * std::abs(central));
}

TEST(Kappa, RejectsBadGrid) {
  const ChangeScenario s{5.0, 0.01, 0.9, 0.8};
  EXPECT_THROW(displaced_tmsv_qre(s, 1.2), DomainError);
}
