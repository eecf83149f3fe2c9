// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "aquacast/autodiff/array.hpp"

namespace aquacast::train {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  std::map<std::string, std::vector<double>> m;
  std::map<std::string, std::vector<double>> v;
  std::size_t step = 0;
};

using NamedArrays = std::map<std::string, ad::Array>;
using NamedGrads = std::map<std::string, std::span<const double>>;

/// One bias-corrected Adam update of every parameter that has a gradient.
/// Throws NumericalError naming the first parameter with a non-finite
/// gradient (before touching any state) and DimensionError on size mismatch.
void adam_step(NamedArrays& params, const NamedGrads& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace aquacast::train
