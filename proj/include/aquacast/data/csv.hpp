// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "aquacast/data/series.hpp"

namespace aquacast::data {

/// Reads a `timestamp,value` CSV. Blank values become NaN. The resolution is
/// the smallest timestamp step. Throws InputError naming row and column.
RawSeries read_series_csv(const std::filesystem::path& path, const std::string& sensor,
                          MetricKind kind);

/// Writes `timestamp,value` with round-trip precision; NaN is written blank.
void write_series_csv(const RawSeries& s, const std::filesystem::path& path);

}  // namespace aquacast::data
