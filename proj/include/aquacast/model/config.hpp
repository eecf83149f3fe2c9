// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include <json.hpp>

namespace aquacast::model {

/// Architecture hyperparameters. Defaults are the desk-scale configuration.
struct ModelConfig {
  std::size_t n_hist_vars = 1;      // V: history channels fed to the patch embedding
  std::size_t n_forecast_vars = 0;  // F: exogenous forecast variables, one token each
  std::size_t n_targets = 1;        // output channels (1 = multi-to-single)
  std::size_t hist_len = 96;
  std::size_t forecast_len = 0;
  std::size_t horizon = 96;
  std::size_t d_model = 64;
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t d_ff = 128;
  std::size_t patch_stride = 8;
  std::size_t kernel1 = 8;
  std::size_t kernel2 = 1;
  double dropout = 0.1;
  double layer_norm_eps = 1e-5;
  std::uint64_t seed = 0;

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  std::size_t d_head() const { return d_model / n_heads; }
  /// Tokens produced by conv1 (the patching stage).
  std::size_t patch_tokens() const { return (hist_len - kernel1) / patch_stride + 1; }
  /// History tokens after conv2 (stride 1, no padding).
  std::size_t history_tokens() const { return patch_tokens() - kernel2 + 1; }
  /// Encoder sequence length: history tokens plus one token per forecast variable.
  std::size_t token_count() const { return history_tokens() + n_forecast_vars; }

  bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, ModelConfig& c);

}  // namespace aquacast::model
