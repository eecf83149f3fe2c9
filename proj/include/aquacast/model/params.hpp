// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aquacast/autodiff/array.hpp"
#include "aquacast/model/config.hpp"

namespace aquacast::model {

/// Every trainable weight, keyed by a stable dotted name.
struct ModelParams {
  std::map<std::string, ad::Array> tensors;

  const ad::Array& at(const std::string& name) const;
  ad::Array& at(const std::string& name);
  std::size_t count() const;

  bool operator==(const ModelParams&) const = default;
};

/// Name and shape of every parameter implied by a configuration.
std::vector<std::pair<std::string, ad::Shape>> parameter_shapes(const ModelConfig& cfg);

/// Pure function of the configuration.
std::size_t parameter_count(const ModelConfig& cfg);

/// Parameters belonging to the attention/feed-forward encoder blocks.
std::size_t encoder_parameter_count(const ModelConfig& cfg);

/// Seeded fan-in-scaled uniform init; layer-norm gains 1 and shifts 0.
ModelParams init_params(const ModelConfig& cfg);

namespace names {
inline constexpr const char* kConv1Weight = "embed.conv1.weight";
inline constexpr const char* kConv1Bias = "embed.conv1.bias";
inline constexpr const char* kConv2Weight = "embed.conv2.weight";
inline constexpr const char* kConv2Bias = "embed.conv2.bias";
inline constexpr const char* kPosition = "embed.position";
inline constexpr const char* kForecastType = "embed.forecast.type";
inline constexpr const char* kDecoderWeight = "decoder.weight";
inline constexpr const char* kDecoderBias = "decoder.bias";
std::string forecast_projector(std::size_t f);
std::string layer(std::size_t l, const char* leaf);
}  // namespace names

}  // namespace aquacast::model
