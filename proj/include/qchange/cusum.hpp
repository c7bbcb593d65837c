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
#include <exception>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "qchange/entropy.hpp"
#include "qchange/errors.hpp"
#include "qchange/jointcomm.hpp"
#include "qchange/pmf.hpp"
#include "qchange/receivers.hpp"

namespace qchange {

using Rng = std::mt19937_64;

enum class Phase { pre, post };

/// splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for one Monte Carlo run.
inline Rng run_rng(std::uint64_t base_seed, std::uint64_t run_index) {
  return Rng(splitmix64(base_seed ^ splitmix64(run_index)));
}

/// CUSUM recursion max(f + llr, 0).
inline double cusum_update(double f, double llr) {
  if (std::isnan(f) || std::isnan(llr)) throw NumericError("cusum_update: NaN input");
  if (!(f >= 0.0)) throw DomainError("cusum_update: statistic must be >= 0");
  return std::max(f + llr, 0.0);
}

/// Pair of data laws p0, p1 with a sampler and the per-sample LLR ln p1/p0.
class LlrModel {
 public:
  virtual ~LlrModel() = default;

  /// Draws one sample from p0 (pre) or p1 (post) and returns its LLR.
  virtual double draw_llr(Rng& rng, Phase phase) const = 0;

  /// S(p1 || p0) in nats.
  double re() const { return re_.value; }
  bool divergent() const { return re_.diverged; }
  const std::string& name() const { return name_; }

  struct SelfCheck {
    double mean = 0.0;
    double stderr_ = 0.0;
    bool passed = true;
  };

  /// Empirical mean LLR under p1 compared with re() (4σ band).
  SelfCheck self_check(int samples = 100'000, std::uint64_t seed = 0x5eedULL) const {
    SelfCheck out;
    if (re_.diverged) return out;
    Rng rng(splitmix64(seed));
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double v = draw_llr(rng, Phase::post);
      sum += v;
      sum2 += v * v;
    }
    out.mean = sum / samples;
    const double var = std::max(0.0, sum2 / samples - out.mean * out.mean);
    out.stderr_ = std::sqrt(var / samples);
    out.passed = std::abs(out.mean - re_.value) <= 4.0 * out.stderr_ + 1e-12 * std::max(1.0, re_.value);
    return out;
  }

 protected:
  LlrModel(std::string name, EntropyValue re) : name_(std::move(name)), re_(re) {}

  void verify() const {
    const auto check = self_check();
    if (!check.passed)
      throw NumericError("LlrModel " + name_ + ": self-check failed (mean LLR " + std::to_string(check.mean) +
                         " vs S " + std::to_string(re_.value) + ")");
  }

 private:
  std::string name_;
  EntropyValue re_;
};

using ModelPtr = std::shared_ptr<const LlrModel>;

/// Scalar Gaussian laws.
class NormalPairModel final : public LlrModel {
 public:
  NormalPairModel(std::string name, GaussianChannelLaw post, GaussianChannelLaw pre)
      : LlrModel(std::move(name), EntropyValue::finite(gaussian_kl(post, pre))), post_(post), pre_(pre) {
    verify();
  }

  double draw_llr(Rng& rng, Phase phase) const override {
    const auto& law = phase == Phase::post ? post_ : pre_;
    std::normal_distribution<double> normal(law.mean, std::sqrt(law.variance));
    return llr(normal(rng));
  }

  double llr(double y) const {
    auto lp = [y](const GaussianChannelLaw& g) {
      const double z = y - g.mean;
      return -0.5 * (z * z / g.variance + std::log(g.variance));
    };
    return lp(post_) - lp(pre_);
  }

 private:
  GaussianChannelLaw post_, pre_;
};

/// Equal-variance normal mixtures (unknown codeword).
class NormalMixtureModel final : public LlrModel {
 public:
  NormalMixtureModel(std::string name, NormalMixture post, NormalMixture pre)
      : LlrModel(std::move(name), EntropyValue::finite(mixture_kl(post, pre))), post_(std::move(post)),
        pre_(std::move(pre)) {
    verify();
  }

  double draw_llr(Rng& rng, Phase phase) const override {
    const auto& law = phase == Phase::post ? post_ : pre_;
    std::size_t c = 0;
    if (law.weights.size() > 1) {
      std::discrete_distribution<std::size_t> pick(law.weights.begin(), law.weights.end());
      c = pick(rng);
    }
    std::normal_distribution<double> normal(law.means[c], law.sigma());
    return llr(normal(rng));
  }

  double llr(double y) const { return post_.log_pdf(y) - pre_.log_pdf(y); }

 private:
  NormalMixture post_, pre_;
};

/// Discrete laws on a common support 0..K, tails folded into the last bin.
class DiscreteModel final : public LlrModel {
 public:
  DiscreteModel(std::string name, const DiscretePmf& post, const DiscretePmf& pre)
      : DiscreteModel(std::move(name), align(post, pre.cutoff()), align(pre, post.cutoff())) {}

  double draw_llr(Rng& rng, Phase phase) const override {
    const auto& cdf = phase == Phase::post ? cdf_post_ : cdf_pre_;
    const double u = std::uniform_real_distribution<double>(0.0, cdf.back())(rng);
    const auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    return llr_[std::min(k, llr_.size() - 1)];
  }

  double llr(std::size_t k) const { return llr_.at(k); }

 private:
  DiscreteModel(std::string name, std::vector<double> post, std::vector<double> pre)
      : LlrModel(std::move(name), discrete_re(DiscretePmf::from_truncated(post), DiscretePmf::from_truncated(pre))) {
    llr_.resize(post.size());
    for (std::size_t k = 0; k < post.size(); ++k) {
      if (post[k] > 0.0 && pre[k] > 0.0)
        llr_[k] = std::log(post[k]) - std::log(pre[k]);
      else if (post[k] > 0.0)
        llr_[k] = std::numeric_limits<double>::infinity();
      else
        llr_[k] = -std::numeric_limits<double>::infinity();
    }
    cdf_post_ = cumulative(post);
    cdf_pre_ = cumulative(pre);
    verify();
  }

  // Coarse-grains p onto 0..min(cutoffs), lumping the remainder into the last bin.
  static std::vector<double> align(const DiscretePmf& p, int other_cutoff) {
    const std::size_t n = static_cast<std::size_t>(std::min(p.cutoff(), other_cutoff)) + 1;
    std::vector<double> v(p.probs().begin(), p.probs().begin() + static_cast<std::ptrdiff_t>(n));
    double rest = p.tail_mass();
    for (std::size_t k = n; k < p.probs().size(); ++k) rest += p.probs()[k];
    v.back() += rest;
    return v;
  }

  static std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> c(p.size());
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) c[k] = (s += p[k]);
    return c;
  }

  std::vector<double> llr_;
  std::vector<double> cdf_post_, cdf_pre_;
};

// ---------------------------------------------------------------------------
// Monte Carlo latency.

struct CusumConfig {
  double log_threshold = 10.0;
  int runs = 20'000;
  std::uint64_t base_seed = 1;
  std::int64_t max_steps = 1'000'000;
  std::int64_t warmup_steps = 0;
  int workers = 0;  // 0: hardware concurrency

  void validate() const {
    if (!(log_threshold > 0.0) || !std::isfinite(log_threshold)) throw DomainError("log_threshold must be > 0");
    if (runs < 1) throw DomainError("runs must be >= 1");
    if (max_steps < 1) throw DomainError("max_steps must be >= 1");
    if (warmup_steps < 0) throw DomainError("warmup_steps must be >= 0");
    if (workers < 0) throw DomainError("workers must be >= 0");
  }
};

struct RunOutcome {
  std::int64_t latency = 0;  // n_d - n_c, or max_steps when censored
  bool censored = false;
  int false_alarms = 0;      // alarms raised during warmup
};

inline RunOutcome run_single(const LlrModel& model, const CusumConfig& config, std::uint64_t run_index) {
  config.validate();
  Rng rng = run_rng(config.base_seed, run_index);
  RunOutcome out;
  double f = 0.0;
  for (std::int64_t i = 0; i < config.warmup_steps; ++i) {
    f = cusum_update(f, model.draw_llr(rng, Phase::pre));
    if (f >= config.log_threshold) {
      f = 0.0;
      ++out.false_alarms;
    }
  }
  for (std::int64_t t = 1; t <= config.max_steps; ++t) {
    f = cusum_update(f, model.draw_llr(rng, Phase::post));
    if (f >= config.log_threshold) {
      out.latency = t;
      return out;
    }
  }
  out.latency = config.max_steps;
  out.censored = true;
  return out;
}

/// Runs every Monte Carlo trial; outcome i always comes from substream i.
inline std::vector<RunOutcome> run_all(const LlrModel& model, const CusumConfig& config) {
  config.validate();
  const int workers = config.workers > 0 ? config.workers
                                         : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(config.runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto work = [&](int w) {
    try {
      for (int i = w; i < config.runs; i += workers)
        outcomes[static_cast<std::size_t>(i)] = run_single(model, config, static_cast<std::uint64_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return outcomes;
}

struct LatencyEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  int censored_count = 0;
  int runs = 0;
  std::int64_t false_alarms = 0;
};

inline LatencyEstimate summarize(const std::vector<RunOutcome>& outcomes) {
  LatencyEstimate est;
  est.runs = static_cast<int>(outcomes.size());
  double sum = 0.0, sum2 = 0.0;
  int used = 0;
  for (const auto& o : outcomes) {
    est.false_alarms += o.false_alarms;
    if (o.censored) {
      ++est.censored_count;
      continue;
    }
    const double x = static_cast<double>(o.latency);
    sum += x;
    sum2 += x * x;
    ++used;
  }
  if (used == 0) throw NumericError("estimate_latency: every run was censored");
  est.mean = sum / used;
  const double var = used > 1 ? std::max(0.0, (sum2 - used * est.mean * est.mean) / (used - 1)) : 0.0;
  est.stderr_ = std::sqrt(var / used);
  return est;
}

inline LatencyEstimate estimate_latency(const LlrModel& model, const CusumConfig& config) {
  return summarize(run_all(model, config));
}

/// Asymptotic latency ln γ / S.
inline double theoretical_latency(double re, double log_threshold) {
  if (!(re > 0.0)) throw DomainError("theoretical_latency: relative entropy must be > 0");
  return log_threshold / re;
}

/// Per-run dump: run_index,latency,censored.
inline void write_run_dump(std::ostream& os, const std::vector<RunOutcome>& outcomes) {
  os << "run_index,latency,censored\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    os << i << ',' << outcomes[i].latency << ',' << (outcomes[i].censored ? 1 : 0) << '\n';
}

}  // namespace qchange
