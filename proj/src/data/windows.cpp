// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/data/windows.hpp"

#include <algorithm>

#include "aquacast/errors.hpp"

namespace aquacast::data {

std::vector<std::size_t> window_starts(std::size_t begin, std::size_t end, const WindowShape& w) {
  std::vector<std::size_t> out;
  for (std::size_t s = begin; s + w.span() <= end; ++s) out.push_back(s);
  return out;
}

std::vector<std::size_t> window_starts(const SeriesSet& set, Part part, const WindowShape& w) {
  const auto [begin, end] = part_range(set.split, part);
  return window_starts(begin, end, w);
}

Batch make_batch(const SeriesSet& set, std::span<const std::size_t> starts, const WindowShape& w) {
  const std::size_t b = starts.size(), v = set.history.size(), f = set.forecast.size();
  const std::size_t nt = set.targets.size();
  Batch out{ad::Array({b, v, w.hist_len}, 0.0),
            f > 0 ? ad::Array({b, f, w.horizon}, 0.0) : ad::Array({0}, 0.0),
            ad::Array({b, nt, w.horizon}, 0.0)};
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t s = starts[i];
    if (s + w.span() > set.length()) throw ContractError("window runs past the end of the series");
    for (std::size_t c = 0; c < v; ++c) {
      std::copy_n(set.history[c].begin() + s, w.hist_len,
                  out.history.values.begin() + (i * v + c) * w.hist_len);
    }
    for (std::size_t c = 0; c < f; ++c) {
      std::copy_n(set.forecast[c].begin() + s + w.hist_len, w.horizon,
                  out.forecast.values.begin() + (i * f + c) * w.horizon);
    }
    for (std::size_t t = 0; t < nt; ++t) {
      std::copy_n(set.history[set.targets[t]].begin() + s + w.hist_len, w.horizon,
                  out.target.values.begin() + (i * nt + t) * w.horizon);
    }
  }
  return out;
}

}  // namespace aquacast::data
