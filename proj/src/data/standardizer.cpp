// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/data/standardizer.hpp"

#include <cmath>

#include "aquacast/errors.hpp"

namespace aquacast::data {

Standardizer Standardizer::fit(const std::vector<std::string>& names,
                               const std::vector<std::vector<double>>& channels,
                               std::size_t train_end) {
  if (names.size() != channels.size()) throw ContractError("standardizer: names/channels differ");
  if (train_end == 0) throw ConfigError("standardizer: empty training split");
  Standardizer s;
  s.names = names;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (channels[c].size() < train_end) throw ContractError("standardizer: channel shorter than split");
    double mean = 0.0;
    for (std::size_t i = 0; i < train_end; ++i) mean += channels[c][i];
    mean /= static_cast<double>(train_end);
    double var = 0.0;
    for (std::size_t i = 0; i < train_end; ++i) var += (channels[c][i] - mean) * (channels[c][i] - mean);
    var /= static_cast<double>(train_end);
    const double sd = std::sqrt(var);
    if (!(sd > 0.0)) {
      throw ConfigError("channel '" + names[c] + "' is constant on the training split");
    }
    s.mean.push_back(mean);
    s.std.push_back(sd);
  }
  return s;
}

std::size_t Standardizer::index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ConfigError("standardizer has no channel '" + name + "'");
}

std::vector<double> Standardizer::standardize(std::size_t c, std::span<const double> v) const {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = standardize(c, v[i]);
  return out;
}

std::vector<double> Standardizer::destandardize(std::size_t c, std::span<const double> z) const {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = destandardize(c, z[i]);
  return out;
}

void to_json(nlohmann::json& j, const Standardizer& s) {
  j = nlohmann::json::array();
  for (std::size_t c = 0; c < s.names.size(); ++c) {
    j.push_back({{"channel", s.names[c]}, {"mean", s.mean[c]}, {"std", s.std[c]}});
  }
}

void from_json(const nlohmann::json& j, Standardizer& s) {
  s = {};
  for (const auto& e : j) {
    s.names.push_back(e.at("channel").get<std::string>());
    s.mean.push_back(e.at("mean").get<double>());
    s.std.push_back(e.at("std").get<double>());
  }
}

}  // namespace aquacast::data
