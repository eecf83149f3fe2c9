// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/data/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "aquacast/errors.hpp"

namespace aquacast::data {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

RawSeries read_series_csv(const std::filesystem::path& path, const std::string& sensor,
                          MetricKind kind) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  const std::string where = path.filename().string();
  std::string line;
  if (!std::getline(in, line) || trim(line) != "timestamp,value") {
    throw InputError(where + ": row 1: expected header 'timestamp,value'");
  }
  RawSeries s;
  s.sensor = sensor;
  s.kind = kind;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw InputError(where + ": row " + std::to_string(row) + ": expected 2 columns");
    }
    const std::string_view ts = trim(std::string_view(line).substr(0, comma));
    const std::string_view vs = trim(std::string_view(line).substr(comma + 1));
    try {
      s.timestamps.push_back(parse_timestamp(ts));
    } catch (const InputError& e) {
      throw InputError(where + ": row " + std::to_string(row) + " column 'timestamp': " +
                       e.what());
    }
    double v = std::numeric_limits<double>::quiet_NaN();
    if (!vs.empty()) {
      const auto [ptr, ec] = std::from_chars(vs.data(), vs.data() + vs.size(), v);
      if (ec != std::errc() || ptr != vs.data() + vs.size() || !std::isfinite(v)) {
        throw InputError(where + ": row " + std::to_string(row) + " column 'value': '" +
                         std::string(vs) + "' is not a number");
      }
    }
    s.values.push_back(v);
  }
  if (s.values.size() < 2) throw InputError(where + ": fewer than two samples");
  std::int64_t step = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 1; i < s.timestamps.size(); ++i) {
    const std::int64_t d = s.timestamps[i] - s.timestamps[i - 1];
    if (d <= 0) {
      throw InputError(where + ": row " + std::to_string(i + 2) +
                       " column 'timestamp': not strictly increasing");
    }
    step = std::min(step, d);
  }
  if (step % 60 != 0) throw InputError(where + ": sample spacing is not a whole minute");
  s.resolution_minutes = static_cast<int>(step / 60);
  return s;
}

void write_series_csv(const RawSeries& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << "timestamp,value\n";
  char buf[64];
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_timestamp(s.timestamps[i]) << ',';
    if (!std::isnan(s.values[i])) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s.values[i]);
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace aquacast::data
