// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/metrics/point.hpp"

#include <cmath>

#include "aquacast/errors.hpp"

namespace aquacast::metrics {

PointMetrics point_metrics(std::span<const double> truth, std::span<const double> pred) {
  if (truth.size() != pred.size()) {
    throw DimensionError("point metrics: " + std::to_string(truth.size()) + " truths vs " +
                         std::to_string(pred.size()) + " predictions");
  }
  if (truth.empty()) throw ContractError("point metrics of an empty series");

  PointMetrics m;
  m.n = truth.size();
  const double n = static_cast<double>(m.n);
  double mean = 0.0;
  for (double y : truth) mean += y;
  mean /= n;
  m.truth_mean = mean;

  double se = 0.0, ae = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    const double e = truth[i] - pred[i];
    se += e * e;
    ae += std::abs(e);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  m.mse = se / n;
  m.mae = ae / n;
  m.rmse = std::sqrt(m.mse);
  if (m.n < 2) {
    m.r2_note = "fewer than two samples";
  } else if (ss_tot == 0.0) {
    m.r2_note = "ground truth is constant";
  } else {
    m.r2 = 1.0 - se / ss_tot;
  }
  return m;
}

}  // namespace aquacast::metrics
