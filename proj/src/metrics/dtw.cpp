// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/metrics/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aquacast/errors.hpp"

namespace aquacast::metrics {
namespace {

struct Cell {
  double cost;
  std::size_t steps;
};

bool better(const Cell& a, const Cell& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.steps < b.steps);
}

}  // namespace

DtwAlignment dtw_align(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw ContractError("dtw of an empty sequence");
  const std::size_t m = y.size();
  // Two rolling rows of the cumulative-cost table.
  std::vector<Cell> prev(m), cur(m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      Cell best{std::numeric_limits<double>::infinity(), 0};
      if (i == 0 && j == 0) best = {0.0, 0};
      if (i > 0 && better(prev[j], best)) best = prev[j];
      if (j > 0 && better(cur[j - 1], best)) best = cur[j - 1];
      if (i > 0 && j > 0 && better(prev[j - 1], best)) best = prev[j - 1];
      cur[j] = {best.cost + std::abs(x[i] - y[j]), best.steps + 1};
    }
    std::swap(prev, cur);
  }
  return {prev[m - 1].cost, prev[m - 1].steps};
}

double dtw(std::span<const double> x, std::span<const double> y) {
  return dtw_align(x, y).distance;
}

double dtw_error(std::span<const double> forecast, std::span<const double> truth) {
  const DtwAlignment a = dtw_align(forecast, truth);
  return a.distance / static_cast<double>(a.path_length);
}

DtwAccuracyCurve accuracy_curve(std::vector<double> errors, std::size_t resolution) {
  if (errors.empty()) throw ContractError("accuracy curve needs at least one sample");
  if (resolution < 2) throw ContractError("accuracy curve needs at least two thresholds");
  DtwAccuracyCurve curve;
  curve.errors = std::move(errors);
  std::vector<double> sorted = curve.errors;
  std::sort(sorted.begin(), sorted.end());
  const double top = sorted.back();
  const double n = static_cast<double>(sorted.size());

  curve.tau.resize(resolution);
  curve.accuracy.resize(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(resolution - 1);
    curve.tau[i] = u * top;
    if (top == 0.0) {
      curve.accuracy[i] = 1.0;
      continue;
    }
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), curve.tau[i]);
    curve.accuracy[i] = static_cast<double>(below - sorted.begin()) / n;
  }
  if (top == 0.0) {
    curve.auc = 1.0;
    return curve;
  }
  double area = 0.0;
  const double du = 1.0 / static_cast<double>(resolution - 1);
  for (std::size_t i = 1; i < resolution; ++i) {
    area += 0.5 * (curve.accuracy[i - 1] + curve.accuracy[i]) * du;
  }
  curve.auc = area;
  return curve;
}

}  // namespace aquacast::metrics
