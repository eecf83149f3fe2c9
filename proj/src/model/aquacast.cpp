// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/model/aquacast.hpp"

#include <cmath>

#include "aquacast/autodiff/ops.hpp"
#include "aquacast/errors.hpp"

namespace aquacast::model {
namespace {

// Adds a leading batch axis of 1 to unbatched inputs.
ad::Tensor ensure_batched(const ad::Tensor& t, std::size_t unbatched_rank, bool& was_batched) {
  was_batched = t.shape().size() == unbatched_rank + 1;
  if (was_batched) return t;
  if (t.shape().size() != unbatched_rank) {
    throw ConfigError("expected rank " + std::to_string(unbatched_rank) + " or " +
                      std::to_string(unbatched_rank + 1) + " input, got " +
                      ad::shape_str(t.shape()));
  }
  ad::Shape s{1};
  s.insert(s.end(), t.shape().begin(), t.shape().end());
  return ad::reshape(t, std::move(s));
}

ad::Tensor drop_batch(const ad::Tensor& t) {
  ad::Shape s(t.shape().begin() + 1, t.shape().end());
  return ad::reshape(t, std::move(s));
}

}  // namespace

const ad::Tensor& BoundParams::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw ContractError("parameter '" + name + "' not bound");
  return it->second;
}

BoundParams bind(ad::Graph& graph, const ModelParams& params, bool trainable) {
  BoundParams out;
  for (const auto& [name, array] : params.tensors) {
    out.tensors.emplace(name, trainable ? graph.parameter(array) : graph.constant(array));
  }
  return out;
}

ad::Tensor embed_history(const ModelConfig& cfg, const BoundParams& p, const ad::Tensor& x) {
  bool batched = false;
  ad::Tensor xb = ensure_batched(x, 2, batched);
  const auto& s = xb.shape();
  if (s[1] != cfg.n_hist_vars || s[2] != cfg.hist_len) {
    throw ConfigError("history block " + ad::shape_str(s) + " does not match config (V=" +
                      std::to_string(cfg.n_hist_vars) + ", L_h=" +
                      std::to_string(cfg.hist_len) + ")");
  }
  ad::Tensor h = ad::conv1d(xb, p.at(names::kConv1Weight), p.at(names::kConv1Bias),
                            cfg.patch_stride);
  h = ad::relu(h);
  h = ad::conv1d(h, p.at(names::kConv2Weight), p.at(names::kConv2Bias), 1);
  h = ad::transpose_last2(h);  // [B, T, D]
  h = ad::add_broadcast(h, p.at(names::kPosition));
  return batched ? h : drop_batch(h);
}

ad::Tensor embed_forecast(const ModelConfig& cfg, const BoundParams& p, const ad::Tensor& r) {
  if (cfg.n_forecast_vars == 0) return {};
  if (!r.valid()) throw ConfigError("forecast block required: config has forecast variables");
  bool batched = false;
  ad::Tensor rb = ensure_batched(r, 2, batched);
  const auto& s = rb.shape();
  if (s[1] != cfg.n_forecast_vars || s[2] != cfg.forecast_len) {
    throw ConfigError("forecast block " + ad::shape_str(s) + " does not match config (F=" +
                      std::to_string(cfg.n_forecast_vars) + ", L_f=" +
                      std::to_string(cfg.forecast_len) + ")");
  }
  ad::Tensor tokens;
  for (std::size_t f = 0; f < cfg.n_forecast_vars; ++f) {
    ad::Tensor series = ad::slice(rb, 1, f, f + 1);  // [B, 1, L_f]
    ad::Tensor tok = ad::linear(series, p.at(names::forecast_projector(f)), {});
    tokens = tokens.valid() ? ad::concat(tokens, tok, 1) : tok;
  }
  tokens = ad::add_broadcast(tokens, p.at(names::kForecastType));
  return batched ? tokens : drop_batch(tokens);
}

ad::Tensor encoder_block(const ModelConfig& cfg, const BoundParams& p, std::size_t layer,
                         const ad::Tensor& tokens, const ForwardOptions& opts) {
  bool batched = false;
  ad::Tensor x = ensure_batched(tokens, 2, batched);
  const auto w = [&](const char* leaf) -> const ad::Tensor& {
    return p.at(names::layer(layer, leaf));
  };
  const double drop = opts.training ? cfg.dropout : 0.0;
  std::mt19937_64* rng = opts.training ? opts.rng : nullptr;

  ad::Tensor q = ad::split_heads(ad::linear(x, w("wq"), {}), cfg.n_heads);
  ad::Tensor k = ad::split_heads(ad::linear(x, w("wk"), {}), cfg.n_heads);
  ad::Tensor v = ad::split_heads(ad::linear(x, w("wv"), {}), cfg.n_heads);
  ad::Tensor scores =
      ad::scale(ad::matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(cfg.d_head())));
  ad::Tensor attn = ad::softmax_rows(scores);
  if (opts.attention) opts.attention->push_back(attn.to_array());
  attn = ad::dropout(attn, drop, rng);
  ad::Tensor heads = ad::merge_heads(ad::matmul(attn, v), cfg.n_heads);
  ad::Tensor mixed = ad::linear(heads, w("wo"), {});
  ad::Tensor z = ad::layer_norm(ad::add(x, mixed), w("ln1.gain"), w("ln1.shift"),
                                cfg.layer_norm_eps);

  ad::Tensor ff = ad::relu(ad::linear(z, w("ff1.weight"), w("ff1.bias")));
  ff = ad::linear(ff, w("ff2.weight"), w("ff2.bias"));
  ff = ad::dropout(ff, drop, rng);
  ad::Tensor y =
      ad::layer_norm(ad::add(z, ff), w("ln2.gain"), w("ln2.shift"), cfg.layer_norm_eps);
  return batched ? y : drop_batch(y);
}

ad::Tensor decode(const ModelConfig& cfg, const BoundParams& p, const ad::Tensor& tokens) {
  bool batched = false;
  ad::Tensor x = ensure_batched(tokens, 2, batched);
  const std::size_t batch = x.shape()[0];
  ad::Tensor flat = ad::flatten_batch(x);
  ad::Tensor out = ad::linear(flat, p.at(names::kDecoderWeight), p.at(names::kDecoderBias));
  out = ad::reshape(out, {batch, cfg.n_targets, cfg.horizon});
  return batched ? out : drop_batch(out);
}

ad::Tensor forward(const ModelConfig& cfg, const BoundParams& p, const ad::Tensor& history,
                   const ad::Tensor& forecast, const ForwardOptions& opts) {
  bool batched = false;
  ad::Tensor hist = ensure_batched(history, 2, batched);
  ad::Tensor tokens = embed_history(cfg, p, hist);
  if (cfg.n_forecast_vars > 0) {
    bool fb = false;
    ad::Tensor fc = forecast.valid() ? ensure_batched(forecast, 2, fb) : forecast;
    if (fc.valid() && fc.shape()[0] != hist.shape()[0]) {
      throw ConfigError("history and forecast batches differ in size");
    }
    tokens = ad::concat(tokens, embed_forecast(cfg, p, fc), 1);
  }
  for (std::size_t l = 0; l < cfg.n_layers; ++l) tokens = encoder_block(cfg, p, l, tokens, opts);
  ad::Tensor out = decode(cfg, p, tokens);
  return batched ? out : drop_batch(out);
}

ad::Array predict(const ModelConfig& cfg, const ModelParams& params, const ad::Array& history,
                  const ad::Array& forecast) {
  ad::Graph g;
  BoundParams p = bind(g, params, false);
  ad::Tensor h = g.constant(history);
  ad::Tensor f = cfg.n_forecast_vars > 0 ? g.constant(forecast) : ad::Tensor{};
  return forward(cfg, p, h, f).to_array();
}

}  // namespace aquacast::model
