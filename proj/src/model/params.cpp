// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/model/params.hpp"

#include <cmath>
#include <random>

#include "aquacast/errors.hpp"

namespace aquacast::model {

namespace names {
std::string forecast_projector(std::size_t f) {
  return "embed.forecast." + std::to_string(f) + ".proj";
}
std::string layer(std::size_t l, const char* leaf) {
  return "layer" + std::to_string(l) + "." + leaf;
}
}  // namespace names

const ad::Array& ModelParams::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ContractError("missing parameter '" + name + "'");
  return it->second;
}

ad::Array& ModelParams::at(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ContractError("missing parameter '" + name + "'");
  return it->second;
}

std::size_t ModelParams::count() const {
  std::size_t n = 0;
  for (const auto& [_, a] : tensors) n += a.size();
  return n;
}

std::vector<std::pair<std::string, ad::Shape>> parameter_shapes(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.d_model;
  std::vector<std::pair<std::string, ad::Shape>> out{
      {names::kConv1Weight, {d, cfg.n_hist_vars, cfg.kernel1}},
      {names::kConv1Bias, {d}},
      {names::kConv2Weight, {d, d, cfg.kernel2}},
      {names::kConv2Bias, {d}},
      {names::kPosition, {cfg.history_tokens(), d}},
  };
  for (std::size_t f = 0; f < cfg.n_forecast_vars; ++f) {
    out.push_back({names::forecast_projector(f), {cfg.forecast_len, d}});
  }
  if (cfg.n_forecast_vars > 0) out.push_back({names::kForecastType, {cfg.n_forecast_vars, d}});
  for (std::size_t l = 0; l < cfg.n_layers; ++l) {
    out.push_back({names::layer(l, "wq"), {d, d}});
    out.push_back({names::layer(l, "wk"), {d, d}});
    out.push_back({names::layer(l, "wv"), {d, d}});
    out.push_back({names::layer(l, "wo"), {d, d}});
    out.push_back({names::layer(l, "ln1.gain"), {d}});
    out.push_back({names::layer(l, "ln1.shift"), {d}});
    out.push_back({names::layer(l, "ff1.weight"), {d, cfg.d_ff}});
    out.push_back({names::layer(l, "ff1.bias"), {cfg.d_ff}});
    out.push_back({names::layer(l, "ff2.weight"), {cfg.d_ff, d}});
    out.push_back({names::layer(l, "ff2.bias"), {d}});
    out.push_back({names::layer(l, "ln2.gain"), {d}});
    out.push_back({names::layer(l, "ln2.shift"), {d}});
  }
  out.push_back({names::kDecoderWeight, {cfg.token_count() * d, cfg.n_targets * cfg.horizon}});
  out.push_back({names::kDecoderBias, {cfg.n_targets * cfg.horizon}});
  return out;
}

std::size_t parameter_count(const ModelConfig& cfg) {
  std::size_t n = 0;
  for (const auto& [_, shape] : parameter_shapes(cfg)) n += ad::numel(shape);
  return n;
}

std::size_t encoder_parameter_count(const ModelConfig& cfg) {
  std::size_t n = 0;
  for (const auto& [name, shape] : parameter_shapes(cfg)) {
    if (name.rfind("layer", 0) == 0) n += ad::numel(shape);
  }
  return n;
}

ModelParams init_params(const ModelConfig& cfg) {
  const std::size_t d = cfg.d_model;
  // Fan-in per parameter; biases share their weight's bound.
  auto fan_in = [&](const std::string& name) -> double {
    if (name.rfind("embed.conv1", 0) == 0) return static_cast<double>(cfg.n_hist_vars * cfg.kernel1);
    if (name.rfind("embed.conv2", 0) == 0) return static_cast<double>(d * cfg.kernel2);
    if (name.rfind("embed.forecast.type", 0) == 0) return static_cast<double>(d);
    if (name.rfind("embed.forecast.", 0) == 0) return static_cast<double>(cfg.forecast_len);
    if (name == names::kPosition) return static_cast<double>(d);
    if (name.rfind("decoder", 0) == 0) return static_cast<double>(cfg.token_count() * d);
    if (name.find("ff2.") != std::string::npos) return static_cast<double>(cfg.d_ff);
    return static_cast<double>(d);
  };
  std::mt19937_64 rng(cfg.seed);
  ModelParams params;
  for (const auto& [name, shape] : parameter_shapes(cfg)) {
    ad::Array a(shape, 0.0);
    const bool is_gain = name.size() > 5 && name.compare(name.size() - 5, 5, ".gain") == 0;
    const bool is_shift = name.size() > 6 && name.compare(name.size() - 6, 6, ".shift") == 0;
    if (is_gain) {
      std::fill(a.values.begin(), a.values.end(), 1.0);
    } else if (!is_shift) {
      const double bound = 1.0 / std::sqrt(fan_in(name));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (double& v : a.values) v = u(rng);
    }
    params.tensors.emplace(name, std::move(a));
  }
  return params;
}

}  // namespace aquacast::model
