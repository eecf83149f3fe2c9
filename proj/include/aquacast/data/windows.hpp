// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "aquacast/autodiff/array.hpp"
#include "aquacast/data/dataset.hpp"

namespace aquacast::data {

inline constexpr std::size_t kHistoryLength = 96;

/// A window starting at s reads history [s, s+hist_len) and predicts
/// [s+hist_len, s+hist_len+horizon); the forecast block covers the same
/// future interval as the target.
struct WindowShape {
  std::size_t hist_len = kHistoryLength;
  std::size_t horizon = 96;
  std::size_t span() const { return hist_len + horizon; }
};

/// Stride-1 window starts lying entirely inside [begin, end).
std::vector<std::size_t> window_starts(std::size_t begin, std::size_t end, const WindowShape& w);
std::vector<std::size_t> window_starts(const SeriesSet& set, Part part, const WindowShape& w);

struct Batch {
  ad::Array history;   // [B, V, hist_len]
  ad::Array forecast;  // [B, F, horizon]; empty shape when F == 0
  ad::Array target;    // [B, n_targets, horizon]
};

Batch make_batch(const SeriesSet& set, std::span<const std::size_t> starts, const WindowShape& w);

}  // namespace aquacast::data
