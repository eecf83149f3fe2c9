// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aquacast::metrics {

/// Bandt-Pompe ordinal pattern statistics of one series.
struct OrdinalDistribution {
  std::size_t dx = 0;
  std::vector<double> probabilities;  // d_x! entries indexed by Lehmer code
  double entropy = 0.0;               // normalized permutation entropy H in [0, 1]
  double divergence = 0.0;            // Jensen-Shannon divergence to uniform
  double complexity = 0.0;            // H * D_JS / Q_max
};

/// Ranks inside each window of d_x consecutive samples; ties keep their
/// order of occurrence. Throws ContractError when the series has fewer than
/// d_x + 1 samples or d_x is outside [2, 10].
OrdinalDistribution complexity(std::span<const double> series, std::size_t dx = 6);

/// Lehmer code of the stable argsort of `window`.
std::size_t ordinal_pattern(std::span<const double> window);

double jensen_shannon_to_uniform(std::span<const double> p);

}  // namespace aquacast::metrics
