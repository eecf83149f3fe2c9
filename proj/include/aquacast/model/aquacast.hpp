// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "aquacast/autodiff/graph.hpp"
#include "aquacast/model/config.hpp"
#include "aquacast/model/params.hpp"

namespace aquacast::model {

/// Parameters placed on a graph for one forward pass.
struct BoundParams {
  std::map<std::string, ad::Tensor> tensors;
  const ad::Tensor& at(const std::string& name) const;
};

BoundParams bind(ad::Graph& graph, const ModelParams& params, bool trainable);

struct ForwardOptions {
  bool training = false;
  std::mt19937_64* rng = nullptr;  // dropout stream; required when training with dropout
  /// When set, receives every layer's attention matrix [B*H, N, N] (pre-dropout).
  std::vector<ad::Array>* attention = nullptr;
};

// Each stage accepts unbatched ([V,L], [F,L], [N,D]) or batched ([B,V,L], ...)
// input and returns the matching rank.

/// Joint Conv1D patch embedding of all history channels -> [T,D] tokens with
/// learned positional embeddings.
ad::Tensor embed_history(const ModelConfig& cfg, const BoundParams& p, const ad::Tensor& x);

/// One token per forecast variable: linear projection of its series plus a
/// type embedding. Returns an invalid Tensor when F == 0.
ad::Tensor embed_forecast(const ModelConfig& cfg, const BoundParams& p, const ad::Tensor& r);

/// Post-norm transformer block: multi-head attention then feed-forward, each
/// with residual and layer norm.
ad::Tensor encoder_block(const ModelConfig& cfg, const BoundParams& p, std::size_t layer,
                         const ad::Tensor& tokens, const ForwardOptions& opts = {});

/// Flattens all tokens and regresses the whole output -> [n_targets, horizon].
ad::Tensor decode(const ModelConfig& cfg, const BoundParams& p, const ad::Tensor& tokens);

/// Full network. `forecast` may be invalid when F == 0. Output is in
/// standardized units.
ad::Tensor forward(const ModelConfig& cfg, const BoundParams& p, const ad::Tensor& history,
                   const ad::Tensor& forecast, const ForwardOptions& opts = {});

/// Inference convenience: history [B,V,L_h], forecast [B,F,L_f] (empty when
/// F == 0) -> predictions [B, n_targets, horizon].
ad::Array predict(const ModelConfig& cfg, const ModelParams& params, const ad::Array& history,
                  const ad::Array& forecast);

}  // namespace aquacast::model
