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

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "qchange/errors.hpp"
#include "qchange/gaussian_state.hpp"
#include "qchange/jointcomm.hpp"
#include "qchange/pmf.hpp"

namespace qchange::io {

using nlohmann::json;

namespace detail {

inline void require_keys(const json& j, const std::set<std::string>& required, const std::set<std::string>& optional,
                         const std::string& what) {
  if (!j.is_object()) throw DomainError(what + ": expected a JSON object");
  for (const auto& key : required)
    if (!j.contains(key)) throw DomainError(what + ": missing field '" + key + "'");
  for (const auto& [key, value] : j.items())
    if (!required.count(key) && !optional.count(key)) throw DomainError(what + ": unknown field '" + key + "'");
}

inline std::vector<double> numbers(const json& j, const std::string& what) {
  if (!j.is_array()) throw DomainError(what + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw DomainError(what + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::vector<std::vector<double>> rows(const json& j, const std::string& what) {
  if (!j.is_array()) throw DomainError(what + ": expected an array of rows");
  std::vector<std::vector<double>> out;
  for (const auto& r : j) out.push_back(numbers(r, what));
  return out;
}

inline std::vector<std::string> strings(const json& j, const std::string& what) {
  if (!j.is_array()) throw DomainError(what + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw DomainError(what + ": expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace detail

inline json to_json(const GaussianState& state) {
  json cov = json::array();
  for (int i = 0; i < state.cov().rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < state.cov().cols(); ++k) row.push_back(state.cov()(i, k));
    cov.push_back(row);
  }
  return {{"mean", std::vector<double>(state.mean().data(), state.mean().data() + state.mean().size())},
          {"cov", cov}};
}

inline GaussianState gaussian_state_from_json(const json& j) {
  detail::require_keys(j, {"mean", "cov"}, {}, "GaussianState");
  const auto mean = detail::numbers(j["mean"], "GaussianState.mean");
  const auto cov = detail::rows(j["cov"], "GaussianState.cov");
  const auto n = static_cast<Eigen::Index>(mean.size());
  Matrix c(n, n);
  if (static_cast<Eigen::Index>(cov.size()) != n) throw DomainError("GaussianState.cov: dimension mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(cov[i].size()) != n) throw DomainError("GaussianState.cov: dimension mismatch");
    for (Eigen::Index k = 0; k < n; ++k) c(i, k) = cov[i][k];
  }
  return {Eigen::Map<const Vector>(mean.data(), n), c};
}

inline json to_json(const DiscretePmf& pmf) { return {{"probs", pmf.probs()}, {"tail_mass", pmf.tail_mass()}}; }

inline DiscretePmf discrete_pmf_from_json(const json& j) {
  detail::require_keys(j, {"probs", "tail_mass"}, {}, "DiscretePmf");
  if (!j["tail_mass"].is_number()) throw DomainError("DiscretePmf.tail_mass: expected a number");
  return {detail::numbers(j["probs"], "DiscretePmf.probs"), j["tail_mass"].get<double>()};
}

inline json to_json(const PluginChannel& c) {
  return {{"labels_x", c.labels_x}, {"labels_y", c.labels_y}, {"prior", c.prior}, {"pre", c.pre}, {"post", c.post}};
}

inline PluginChannel plugin_channel_from_json(const json& j) {
  detail::require_keys(j, {"prior", "pre", "post"}, {"labels_x", "labels_y"}, "PluginChannel");
  PluginChannel c;
  if (j.contains("labels_x")) c.labels_x = detail::strings(j["labels_x"], "PluginChannel.labels_x");
  if (j.contains("labels_y")) c.labels_y = detail::strings(j["labels_y"], "PluginChannel.labels_y");
  c.prior = detail::numbers(j["prior"], "PluginChannel.prior");
  c.pre = detail::rows(j["pre"], "PluginChannel.pre");
  c.post = detail::rows(j["post"], "PluginChannel.post");
  c.validate();
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline PluginChannel load_plugin_channel(const std::string& path) {
  return plugin_channel_from_json(read_json_file(path));
}

}  // namespace qchange::io
