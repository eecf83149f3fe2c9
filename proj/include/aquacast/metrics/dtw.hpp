// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aquacast::metrics {

struct DtwAlignment {
  double distance = 0.0;
  // Steps on the chosen optimal warping path; among equal-cost paths the
  // shortest is taken.
  std::size_t path_length = 0;
};

/// Dynamic time warping with |x_i - y_j| cost. Throws ContractError on empty input.
DtwAlignment dtw_align(std::span<const double> x, std::span<const double> y);
double dtw(std::span<const double> x, std::span<const double> y);

/// Per-sample error used by the accuracy curve: DTW distance / path length.
double dtw_error(std::span<const double> forecast, std::span<const double> truth);

struct DtwAccuracyCurve {
  std::vector<double> errors;    // one per sample
  std::vector<double> tau;       // uniform grid over [0, max error]
  std::vector<double> accuracy;  // fraction of errors strictly below tau
  double auc = 1.0;              // trapezoid area on the tau/max axis
};

/// Threshold sweep over per-sample errors. With every error zero the curve is
/// identically 1 and the AUC is 1.
DtwAccuracyCurve accuracy_curve(std::vector<double> errors, std::size_t resolution = 1000);

}  // namespace aquacast::metrics
