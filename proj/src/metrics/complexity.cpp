// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/metrics/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aquacast/errors.hpp"

namespace aquacast::metrics {
namespace {

double shannon(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) {
    if (v > 0.0) s -= v * std::log(v);
  }
  return s;
}

std::size_t factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::size_t ordinal_pattern(std::span<const double> window) {
  const std::size_t d = window.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return window[a] < window[b]; });
  std::size_t code = 0;
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t smaller_after = 0;
    for (std::size_t j = i + 1; j < d; ++j) smaller_after += order[j] < order[i];
    code = code * (d - i) + smaller_after;
  }
  return code;
}

double jensen_shannon_to_uniform(std::span<const double> p) {
  const double u = 1.0 / static_cast<double>(p.size());
  std::vector<double> mid(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + u);
  const double s_uniform = std::log(static_cast<double>(p.size()));
  return shannon(mid) - 0.5 * shannon(p) - 0.5 * s_uniform;
}

OrdinalDistribution complexity(std::span<const double> series, std::size_t dx) {
  if (dx < 2 || dx > 10) throw ContractError("embedding dimension must lie in [2, 10]");
  if (series.size() < dx + 1) {
    throw ContractError("series of length " + std::to_string(series.size()) +
                        " too short for embedding dimension " + std::to_string(dx));
  }
  const std::size_t patterns = factorial(dx);
  std::vector<std::size_t> counts(patterns, 0);
  const std::size_t windows = series.size() - dx + 1;
  for (std::size_t t = 0; t < windows; ++t) ++counts[ordinal_pattern(series.subspan(t, dx))];

  OrdinalDistribution out;
  out.dx = dx;
  out.probabilities.resize(patterns);
  for (std::size_t i = 0; i < patterns; ++i) {
    out.probabilities[i] = static_cast<double>(counts[i]) / static_cast<double>(windows);
  }
  out.entropy = shannon(out.probabilities) / std::log(static_cast<double>(patterns));
  out.divergence = jensen_shannon_to_uniform(out.probabilities);

  std::vector<double> point_mass(patterns, 0.0);
  point_mass[0] = 1.0;
  const double q_max = jensen_shannon_to_uniform(point_mass);
  out.complexity = out.entropy * out.divergence / q_max;
  return out;
}

}  // namespace aquacast::metrics
