// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

#include "aquacast/cdm/terrain.hpp"
#include "aquacast/errors.hpp"

namespace aquacast::cdm {
namespace {

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

template <typename F>
void for_neighbours(const Grid& g, std::size_t cell, F&& f) {
  const long r = static_cast<long>(cell / g.cols), c = static_cast<long>(cell % g.cols);
  for (int k = 0; k < 8; ++k) {
    const long nr = r + kDr[k], nc = c + kDc[k];
    if (nr < 0 || nc < 0 || nr >= static_cast<long>(g.rows) || nc >= static_cast<long>(g.cols)) {
      continue;
    }
    f(static_cast<std::size_t>(nr) * g.cols + static_cast<std::size_t>(nc));
  }
}

struct Basins {
  std::vector<std::size_t> parent;
  std::vector<double> floor;  // lowest elevation in the basin

  std::size_t find(std::size_t b) {
    while (parent[b] != b) b = parent[b] = parent[parent[b]];
    return b;
  }
};

}  // namespace

WatershedLabels segment_watersheds(const Terrain& t, double merge_depth) {
  const Grid& g = t.grid;
  if (t.elevation.size() != g.size() || g.size() == 0) {
    throw ContractError("terrain elevation does not match its grid");
  }
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> raw(g.size(), kNone);
  Basins basins;

  // (elevation, push order, cell); the push order makes ties deterministic.
  using Item = std::tuple<double, std::size_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  std::size_t pushed = 0;
  for (std::size_t cell = 0; cell < g.size(); ++cell) {
    bool lowest = true;
    for_neighbours(g, cell, [&](std::size_t n) {
      if (t.elevation[n] < t.elevation[cell]) lowest = false;
    });
    if (!lowest) continue;
    raw[cell] = basins.parent.size();
    basins.parent.push_back(raw[cell]);
    basins.floor.push_back(t.elevation[cell]);
    queue.emplace(t.elevation[cell], pushed++, cell);
  }

  while (!queue.empty()) {
    const auto [level, order, cell] = queue.top();
    queue.pop();
    for_neighbours(g, cell, [&](std::size_t n) {
      if (raw[n] == kNone) {
        raw[n] = raw[cell];
        queue.emplace(t.elevation[n], pushed++, n);
        return;
      }
      std::size_t a = basins.find(raw[cell]), b = basins.find(raw[n]);
      if (a == b) return;
      const double pass = std::max(t.elevation[cell], t.elevation[n]);
      if (basins.floor[a] > basins.floor[b] || (basins.floor[a] == basins.floor[b] && a > b)) {
        std::swap(a, b);  // a is the deeper basin
      }
      if (pass - basins.floor[b] <= merge_depth) basins.parent[b] = a;
    });
  }

  WatershedLabels out;
  out.grid = g;
  out.label.resize(g.size());
  std::vector<std::size_t> compact(basins.parent.size(), kNone);
  for (std::size_t cell = 0; cell < g.size(); ++cell) {
    const std::size_t root = basins.find(raw[cell]);
    if (compact[root] == kNone) compact[root] = out.count++;
    out.label[cell] = compact[root];
  }
  return out;
}

double merge_depth_for_detail(const Terrain& t, double detail) {
  const auto [lo, hi] = std::minmax_element(t.elevation.begin(), t.elevation.end());
  return (*hi - *lo) * std::exp2(-detail);
}

std::vector<WatershedInfo> watershed_info(const Terrain& t, const WatershedLabels& labels,
                                          const WatershedLaw& law) {
  const Grid& g = t.grid;
  std::vector<WatershedInfo> info(labels.count);
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      // One-sided differences at the borders.
      const std::size_t r0 = r > 0 ? r - 1 : r, r1 = r + 1 < g.rows ? r + 1 : r;
      const std::size_t c0 = c > 0 ? c - 1 : c, c1 = c + 1 < g.cols ? c + 1 : c;
      const double gy = r1 > r0 ? (t.at(r1, c) - t.at(r0, c)) / (double(r1 - r0) * t.cellsize) : 0.0;
      const double gx = c1 > c0 ? (t.at(r, c1) - t.at(r, c0)) / (double(c1 - c0) * t.cellsize) : 0.0;
      WatershedInfo& w = info[labels.label[r * g.cols + c]];
      ++w.cells;
      w.mean_slope += std::hypot(gx, gy);
      w.centroid_row += static_cast<double>(r);
      w.centroid_col += static_cast<double>(c);
    }
  }
  for (WatershedInfo& w : info) {
    const double n = static_cast<double>(w.cells);
    w.mean_slope /= n;
    w.centroid_row /= n;
    w.centroid_col /= n;
    w.tau = law.tau_flat / (1.0 + w.mean_slope / law.slope_ref);
  }
  return info;
}

WatershedAccumulator::WatershedAccumulator(const WatershedLabels& labels, std::vector<double> tau)
    : labels_(labels), y_(labels.count, 0.0), raw_(labels.count, 0.0) {
  if (tau.size() != labels.count) throw ContractError("one time constant per watershed required");
  for (double v : tau) a_.push_back(v > 0.0 ? std::exp(-1.0 / v) : 0.0);
}

const std::vector<double>& WatershedAccumulator::step(const std::vector<double>& intensity) {
  if (intensity.size() != labels_.label.size()) {
    throw DimensionError("intensity grid does not match the watershed labels");
  }
  std::fill(raw_.begin(), raw_.end(), 0.0);
  for (std::size_t cell = 0; cell < intensity.size(); ++cell) raw_[labels_.label[cell]] += intensity[cell];
  for (std::size_t w = 0; w < y_.size(); ++w) y_[w] = a_[w] * y_[w] + (1.0 - a_[w]) * raw_[w];
  return y_;
}

double WatershedAccumulator::storage() const {
  double s = 0.0;
  for (std::size_t w = 0; w < y_.size(); ++w) s += a_[w] / (1.0 - a_[w]) * y_[w];
  return s;
}

std::vector<std::vector<double>> watershed_accumulate(
    const WatershedLabels& labels, const std::vector<std::vector<double>>& intensity,
    const std::vector<double>& tau) {
  WatershedAccumulator acc(labels, tau);
  std::vector<std::vector<double>> out;
  out.reserve(intensity.size());
  for (const auto& grid : intensity) out.push_back(acc.step(grid));
  return out;
}

}  // namespace aquacast::cdm
