// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/train/adam.hpp"

#include <cmath>

#include "aquacast/errors.hpp"

namespace aquacast::train {

void adam_step(NamedArrays& params, const NamedGrads& grads, AdamState& state,
               const AdamConfig& cfg) {
  for (const auto& [name, g] : grads) {
    auto it = params.find(name);
    if (it == params.end()) throw ContractError("gradient for unknown parameter '" + name + "'");
    if (g.size() != it->second.size()) {
      throw DimensionError("gradient of '" + name + "' has " + std::to_string(g.size()) +
                           " entries, parameter has " + std::to_string(it->second.size()));
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i])) {
        throw NumericalError("non-finite gradient in parameter '" + name + "' at index " +
                             std::to_string(i) + " (step " + std::to_string(state.step + 1) + ")");
      }
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (const auto& [name, g] : grads) {
    std::vector<double>& values = params.at(name).values;
    auto& m = state.m[name];
    auto& v = state.v[name];
    if (m.empty()) {
      m.assign(g.size(), 0.0);
      v.assign(g.size(), 0.0);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      values[i] -= cfg.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.eps);
    }
  }
}

}  // namespace aquacast::train
