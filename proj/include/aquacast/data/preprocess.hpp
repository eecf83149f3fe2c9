// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "aquacast/data/series.hpp"

namespace aquacast::data {

/// Human-readable record of what the pipeline did, in order.
struct PipelineLog {
  std::vector<std::string> stages;   // e.g. "flag", "fill", "downsample"
  std::vector<std::string> entries;  // free-form messages
  void stage(const std::string& channel, const std::string& name);
  void note(std::string message);
};

/// Number of equal consecutive samples that spans one hour at `resolution_minutes`
/// (4 at 15 minutes, 60 at 1 minute).
std::size_t run_threshold(int resolution_minutes);

/// Marks every maximal run of at least `min_run` equal values. NaNs break runs.
std::vector<bool> flag_missing_runs(std::span<const double> values, std::size_t min_run = 4);

/// Natural cubic spline through all samples that are neither masked nor NaN,
/// evaluated at the others (linear extension outside the first/last knot).
/// Throws InputError with fewer than four knots.
std::vector<double> spline_fill(std::span<const double> values, const std::vector<bool>& mask);
RawSeries spline_fill(const RawSeries& s, const std::vector<bool>& mask);

/// Block mean of 15 one-minute samples aligned to quarter hours, stamped at
/// the block start. Incomplete blocks at either end are dropped and logged.
RawSeries downsample_to_15min(const RawSeries& s, PipelineLog* log = nullptr);

/// Each hourly value followed by three zeros on the 15-minute grid.
RawSeries upsample_precip(const RawSeries& p);

/// Runs the full per-channel pipeline and returns a gap-free 15-minute series.
///   endogenous: flag -> fill -> downsample (1-minute input only)
///   precipitation: missing -> 0, then upsample (hourly) or block sum (1-minute)
RawSeries preprocess_series(const RawSeries& raw, PipelineLog& log);

}  // namespace aquacast::data
