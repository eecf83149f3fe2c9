// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace aquacast::metrics {

struct PointMetrics {
  double mse = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  // Empty when the truth is constant (or n < 2); r2_note then says why.
  std::optional<double> r2;
  std::string r2_note;
  std::size_t n = 0;
  double truth_mean = 0.0;
};

/// Throws DimensionError on unequal lengths and ContractError on empty input.
PointMetrics point_metrics(std::span<const double> truth, std::span<const double> pred);

}  // namespace aquacast::metrics
