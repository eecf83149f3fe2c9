// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/data/series.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "aquacast/errors.hpp"

namespace aquacast::data {

std::string_view kind_name(MetricKind k) {
  switch (k) {
    case MetricKind::WaterHeight: return "water_height";
    case MetricKind::Discharge: return "discharge";
    case MetricKind::Precipitation: return "precipitation";
  }
  return "unknown";
}

MetricKind parse_kind(std::string_view name) {
  if (name == "water_height") return MetricKind::WaterHeight;
  if (name == "discharge") return MetricKind::Discharge;
  if (name == "precipitation") return MetricKind::Precipitation;
  throw InputError("unknown metric kind '" + std::string(name) + "'");
}

std::int64_t parse_timestamp(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, consumed = 0;
  const std::string buf(text);
  const int n = std::sscanf(buf.c_str(), "%4d-%2d-%2dT%2d:%2d%n", &y, &mo, &d, &h, &mi, &consumed);
  if (n != 5) throw InputError("malformed timestamp '" + buf + "'");
  std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
  if (rest.size() >= 3 && rest[0] == ':') {
    if (std::sscanf(buf.c_str() + consumed, ":%2d", &s) != 1) {
      throw InputError("malformed timestamp '" + buf + "'");
    }
    rest.remove_prefix(3);
  }
  if (rest == "Z" || rest == "+00:00") rest = {};
  if (!rest.empty()) throw InputError("timestamp '" + buf + "' is not UTC ISO-8601");
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw InputError("timestamp '" + buf + "' out of range");
  }
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_timestamp(std::int64_t t) {
  using namespace std::chrono;
  const auto day_count = static_cast<int>(std::floor(static_cast<double>(t) / 86400.0));
  const year_month_day ymd{sys_days{days{day_count}}};
  const std::int64_t sec = t - static_cast<std::int64_t>(day_count) * 86400;
  char out[32];
  std::snprintf(out, sizeof out, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(sec / 3600),
                int(sec / 60 % 60), int(sec % 60));
  return out;
}

RawSeries regularize(const RawSeries& s) {
  if (s.timestamps.size() != s.values.size()) {
    throw ContractError("series '" + s.sensor + "' has mismatched timestamp/value counts");
  }
  const int res = s.resolution_minutes;
  if (res != 1 && res != 15 && res != 60) {
    throw InputError("series '" + s.sensor + "': resolution " + std::to_string(res) +
                     " min is not one of 1, 15, 60");
  }
  RawSeries out = s;
  out.timestamps.clear();
  out.values.clear();
  if (s.timestamps.empty()) return out;
  const std::int64_t step = res * 60;
  for (std::size_t i = 0; i < s.timestamps.size(); ++i) {
    const std::int64_t t = s.timestamps[i];
    if (t % step != 0) {
      throw InputError("series '" + s.sensor + "' sample " + std::to_string(i + 1) + " at " +
                       format_timestamp(t) + " is off its " + std::to_string(res) +
                       "-minute grid");
    }
    if (i > 0 && t <= s.timestamps[i - 1]) {
      throw InputError("series '" + s.sensor + "' timestamps not strictly increasing at sample " +
                       std::to_string(i + 1));
    }
    if (i > 0) {
      for (std::int64_t gap = s.timestamps[i - 1] + step; gap < t; gap += step) {
        out.timestamps.push_back(gap);
        out.values.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    out.timestamps.push_back(t);
    out.values.push_back(s.values[i]);
  }
  return out;
}

}  // namespace aquacast::data
