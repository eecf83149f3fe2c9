// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace aquacast::data {

/// Per-channel mean/std fitted on a training prefix.
struct Standardizer {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> std;

  /// Population statistics over values[0, train_end). Throws ConfigError for a
  /// channel that is constant on that range.
  static Standardizer fit(const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& channels, std::size_t train_end);

  std::size_t index(const std::string& name) const;
  double standardize(std::size_t c, double v) const { return (v - mean[c]) / std[c]; }
  double destandardize(std::size_t c, double z) const { return z * std[c] + mean[c]; }
  std::vector<double> standardize(std::size_t c, std::span<const double> v) const;
  std::vector<double> destandardize(std::size_t c, std::span<const double> z) const;

  bool operator==(const Standardizer&) const = default;
};

void to_json(nlohmann::json& j, const Standardizer& s);
void from_json(const nlohmann::json& j, Standardizer& s);

}  // namespace aquacast::data
