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

#include <cstdio>

#include "qchange.hpp"

int main() {
  using namespace qchange;
  const ChangeScenario scenario{5.0, 1e-4, 0.9, 0.8};

  std::printf("D_TMSV      %.6f nats\n", qre_tmsv(scenario).value);
  std::printf("D_coh       %.6f nats\n", qre_coherent(scenario).value);
  std::printf("coh + hom   %.6f nats\n", re_coherent_homodyne(scenario));
  std::printf("Kennedy     %.6f nats\n", re_kennedy(scenario).value);
  std::printf("TMS + PNR   %.6f nats\n", re_tmsv_pnr(scenario, std::nullopt).series_form.value);

  const ModelPtr model = make_model(ModelSpec::parse("tmsv_pnr"), scenario);
  CusumConfig config;
  config.log_threshold = 8.0;
  config.runs = 2000;
  const LatencyEstimate latency = estimate_latency(*model, config);
  std::printf("CUSUM latency at ln(gamma)=8: %.2f +- %.2f (ln(gamma)/S = %.2f)\n", latency.mean, latency.stderr_,
              theoretical_latency(model->re(), config.log_threshold));
}
