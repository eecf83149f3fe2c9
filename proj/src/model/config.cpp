// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/model/config.hpp"

#include <set>
#include <string>

#include "aquacast/errors.hpp"

namespace aquacast::model {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("model config: " + what);
}

}  // namespace

void ModelConfig::validate() const {
  require(n_hist_vars >= 1, "n_hist_vars must be at least 1");
  require(n_targets >= 1 && n_targets <= n_hist_vars,
          "n_targets must lie in [1, n_hist_vars]");
  require(n_forecast_vars == 0 || forecast_len >= 1,
          "forecast variables need forecast_len >= 1");
  require(horizon >= 1, "horizon must be at least 1");
  require(d_model >= 2, "d_model must be at least 2");
  require(n_heads >= 1 && d_model % n_heads == 0, "d_model must be divisible by n_heads");
  require(d_ff >= 1, "d_ff must be at least 1");
  require(patch_stride >= 1, "patch_stride must be at least 1");
  require(kernel1 >= 1 && kernel1 <= hist_len, "kernel1 must lie in [1, hist_len]");
  require((hist_len - kernel1) % patch_stride == 0,
          "(hist_len - kernel1) must be divisible by patch_stride");
  require(kernel2 >= 1 && kernel2 <= patch_tokens(), "kernel2 longer than the patch sequence");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  require(layer_norm_eps > 0.0, "layer_norm_eps must be positive");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"n_hist_vars", c.n_hist_vars},
                     {"n_forecast_vars", c.n_forecast_vars},
                     {"n_targets", c.n_targets},
                     {"hist_len", c.hist_len},
                     {"forecast_len", c.forecast_len},
                     {"horizon", c.horizon},
                     {"d_model", c.d_model},
                     {"n_layers", c.n_layers},
                     {"n_heads", c.n_heads},
                     {"d_ff", c.d_ff},
                     {"patch_stride", c.patch_stride},
                     {"kernel1", c.kernel1},
                     {"kernel2", c.kernel2},
                     {"dropout", c.dropout},
                     {"layer_norm_eps", c.layer_norm_eps},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  static const std::set<std::string> known{
      "n_hist_vars", "n_forecast_vars", "n_targets", "hist_len",     "forecast_len",
      "horizon",     "d_model",         "n_layers",  "n_heads",      "d_ff",
      "patch_stride", "kernel1",        "kernel2",   "dropout",      "layer_norm_eps",
      "seed"};
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("model config: unknown key '" + key + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("n_hist_vars", c.n_hist_vars);
  get("n_forecast_vars", c.n_forecast_vars);
  get("n_targets", c.n_targets);
  get("hist_len", c.hist_len);
  get("forecast_len", c.forecast_len);
  get("horizon", c.horizon);
  get("d_model", c.d_model);
  get("n_layers", c.n_layers);
  get("n_heads", c.n_heads);
  get("d_ff", c.d_ff);
  get("patch_stride", c.patch_stride);
  get("kernel1", c.kernel1);
  get("kernel2", c.kernel2);
  get("dropout", c.dropout);
  get("layer_norm_eps", c.layer_norm_eps);
  get("seed", c.seed);
}

}  // namespace aquacast::model
