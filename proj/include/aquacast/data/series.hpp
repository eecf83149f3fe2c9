// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aquacast::data {

enum class MetricKind { WaterHeight, Discharge, Precipitation };

std::string_view kind_name(MetricKind k);
/// Accepts "water_height", "discharge", "precipitation". Throws InputError.
MetricKind parse_kind(std::string_view name);

inline constexpr int kGridMinutes = 15;
inline constexpr std::int64_t kGridSeconds = kGridMinutes * 60;

/// One sensor's samples. Missing values are NaN.
struct RawSeries {
  std::string sensor;
  MetricKind kind = MetricKind::WaterHeight;
  int resolution_minutes = kGridMinutes;
  std::vector<std::int64_t> timestamps;  // UTC seconds, strictly increasing
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const RawSeries&) const = default;
};

/// Parses "YYYY-MM-DDTHH:MM[:SS][Z]" (UTC). Throws InputError on malformed text.
std::int64_t parse_timestamp(std::string_view text);
/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(std::int64_t t);

/// Checks timestamps are strictly increasing and on the resolution grid, then
/// inserts NaN samples for absent grid points. Throws InputError.
RawSeries regularize(const RawSeries& s);

}  // namespace aquacast::data
