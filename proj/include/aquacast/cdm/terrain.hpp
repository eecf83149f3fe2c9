// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "aquacast/cdm/clouds.hpp"

namespace aquacast::cdm {

struct Terrain {
  Grid grid;
  double cellsize = 10.0;          // metres
  std::vector<double> elevation;   // metres, row-major

  double at(std::size_t r, std::size_t c) const { return elevation[r * grid.cols + c]; }
  /// Bilinear elevation at a continuous (row, col) position, clamped to the grid.
  double sample(double row, double col) const;
};

struct FractalParams {
  double base = 400.0;       // mean elevation (m)
  double amplitude = 80.0;   // first displacement scale (m)
  double roughness = 0.6;    // per-octave amplitude factor, in (0, 1)
};

/// Diamond-square midpoint displacement on the smallest 2^n+1 square that
/// covers the grid, cropped to it.
Terrain fractal_terrain(Grid grid, double cellsize, const FractalParams& p, std::uint64_t seed);

/// Plain ASCII grid: `ncols N`, `nrows M`, `cellsize C` header lines, then M
/// rows of N elevations. Throws InputError with the offending line number.
Terrain read_ascii_grid(const std::filesystem::path& path);
void write_ascii_grid(const std::filesystem::path& path, const Terrain& t);

struct WatershedLabels {
  Grid grid;
  std::vector<std::size_t> label;  // one per cell, compact in [0, count)
  std::size_t count = 0;
};

/// Priority-flood labeling from every local minimum (cells with no strictly
/// lower 8-neighbour). When two basins first touch, the shallower one is
/// merged into the other if its depth below the pass is at most `merge_depth`.
/// Labels are numbered in raster order of first appearance.
WatershedLabels segment_watersheds(const Terrain& t, double merge_depth);

/// User-facing detail level: the merge depth is relief * 2^-detail, so higher
/// detail keeps more (shallower) watersheds.
double merge_depth_for_detail(const Terrain& t, double detail);

struct WatershedLaw {
  double tau_flat = 24.0;    // steps, time constant of a flat watershed
  double slope_ref = 0.05;   // mean slope at which tau halves
  // Share of the rain that drains through a slow infiltration store common
  // to all watersheds; it gives the flows a multi-day recession.
  double slow_fraction = 0.8;
  double tau_slow = 500.0;   // steps
};

struct WatershedInfo {
  std::size_t cells = 0;
  double mean_slope = 0.0;   // mean central-difference gradient magnitude (m/m)
  double tau = 0.0;          // steps: tau_flat / (1 + mean_slope / slope_ref)
  double centroid_row = 0.0;
  double centroid_col = 0.0;
};

std::vector<WatershedInfo> watershed_info(const Terrain& t, const WatershedLabels& labels,
                                          const WatershedLaw& law);

/// Per-watershed first-order low-pass of the rain falling on it:
/// y[t] = a y[t-1] + (1 - a) sum_{cells in w} intensity, a = exp(-1 / tau).
class WatershedAccumulator {
 public:
  WatershedAccumulator(const WatershedLabels& labels, std::vector<double> tau);
  /// Advances one step; returns the filtered inflow of every watershed.
  const std::vector<double>& step(const std::vector<double>& intensity);
  /// Unfiltered per-watershed rain of the last step.
  const std::vector<double>& rain() const { return raw_; }
  /// Water held in the filters: sum of a/(1-a) * y.
  double storage() const;

 private:
  const WatershedLabels& labels_;
  std::vector<double> a_;
  std::vector<double> y_;
  std::vector<double> raw_;
};

/// Whole-series form of the accumulator; intensity is [steps][cells].
std::vector<std::vector<double>> watershed_accumulate(
    const WatershedLabels& labels, const std::vector<std::vector<double>>& intensity,
    const std::vector<double>& tau);

}  // namespace aquacast::cdm
