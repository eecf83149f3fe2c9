// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/data/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "aquacast/errors.hpp"

namespace aquacast::data {

void PipelineLog::stage(const std::string& channel, const std::string& name) {
  stages.push_back(channel + ":" + name);
}

void PipelineLog::note(std::string message) { entries.push_back(std::move(message)); }

std::size_t run_threshold(int resolution_minutes) {
  return std::max<std::size_t>(2, static_cast<std::size_t>(60 / resolution_minutes));
}

std::vector<bool> flag_missing_runs(std::span<const double> values, std::size_t min_run) {
  std::vector<bool> mask(values.size(), false);
  std::size_t begin = 0;
  while (begin < values.size()) {
    std::size_t end = begin + 1;
    if (!std::isnan(values[begin])) {
      while (end < values.size() && values[end] == values[begin]) ++end;
      if (end - begin >= min_run) std::fill(mask.begin() + begin, mask.begin() + end, true);
    }
    begin = end;
  }
  return mask;
}

std::vector<double> spline_fill(std::span<const double> values, const std::vector<bool>& mask) {
  std::vector<double> out(values.begin(), values.end());
  std::vector<double> x, y;
  bool any_missing = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool missing = (i < mask.size() && mask[i]) || std::isnan(values[i]);
    any_missing |= missing;
    if (!missing) {
      x.push_back(static_cast<double>(i));
      y.push_back(values[i]);
    }
  }
  if (!any_missing) return out;
  const std::size_t n = x.size();
  if (n < 4) {
    throw InputError("spline interpolation needs at least 4 knots, got " + std::to_string(n));
  }

  // Second derivatives m with m[0] = m[n-1] = 0, interior rows solved by the
  // Thomas algorithm.
  std::vector<double> h(n - 1), m(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x[i + 1] - x[i];
  if (n > 2) {
    const std::size_t k = n - 2;
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = r + 1;
      diag[r] = 2.0 * (h[i - 1] + h[i]);
      upper[r] = h[i];
      rhs[r] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    for (std::size_t r = 1; r < k; ++r) {
      const double w = h[r] / diag[r - 1];  // sub-diagonal of row r is h[r]
      diag[r] -= w * upper[r - 1];
      rhs[r] -= w * rhs[r - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t r = k - 1; r-- > 0;) m[r + 1] = (rhs[r] - upper[r] * m[r + 2]) / diag[r];
  }

  const double slope_start = (y[1] - y[0]) / h[0] - h[0] * (2.0 * m[0] + m[1]) / 6.0;
  const double slope_end =
      (y[n - 1] - y[n - 2]) / h[n - 2] + h[n - 2] * (m[n - 2] + 2.0 * m[n - 1]) / 6.0;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool missing = (i < mask.size() && mask[i]) || std::isnan(values[i]);
    if (!missing) continue;
    const double t = static_cast<double>(i);
    if (t < x[0]) {
      out[i] = y[0] + slope_start * (t - x[0]);
      continue;
    }
    if (t > x[n - 1]) {
      out[i] = y[n - 1] + slope_end * (t - x[n - 1]);
      continue;
    }
    while (x[seg + 1] < t) ++seg;
    const double hi = h[seg], a = x[seg + 1] - t, b = t - x[seg];
    out[i] = m[seg] * a * a * a / (6.0 * hi) + m[seg + 1] * b * b * b / (6.0 * hi) +
             (y[seg] / hi - m[seg] * hi / 6.0) * a + (y[seg + 1] / hi - m[seg + 1] * hi / 6.0) * b;
  }
  return out;
}

RawSeries spline_fill(const RawSeries& s, const std::vector<bool>& mask) {
  RawSeries out = s;
  out.values = spline_fill(std::span<const double>(s.values), mask);
  return out;
}

namespace {

// Shared block reduction for 1-minute -> 15-minute conversion.
template <typename Reduce>
RawSeries reduce_to_15min(const RawSeries& s, PipelineLog* log, Reduce reduce) {
  if (s.resolution_minutes != 1) {
    throw ContractError("15-minute block reduction expects 1-minute input for '" + s.sensor + "'");
  }
  RawSeries out = s;
  out.resolution_minutes = kGridMinutes;
  out.timestamps.clear();
  out.values.clear();
  std::size_t i = 0;
  while (i < s.size() && s.timestamps[i] % kGridSeconds != 0) ++i;
  if (i > 0 && log) {
    log->note(s.sensor + ": dropped " + std::to_string(i) + " leading samples before the first quarter hour");
  }
  for (; i + kGridMinutes <= s.size(); i += kGridMinutes) {
    out.timestamps.push_back(s.timestamps[i]);
    out.values.push_back(reduce(s.values.data() + i));
  }
  if (i < s.size() && log) {
    log->note(s.sensor + ": dropped partial trailing block of " + std::to_string(s.size() - i) +
              " samples");
  }
  return out;
}

}  // namespace

RawSeries downsample_to_15min(const RawSeries& s, PipelineLog* log) {
  return reduce_to_15min(s, log, [](const double* v) {
    double sum = 0.0;
    for (int k = 0; k < kGridMinutes; ++k) sum += v[k];
    return sum / kGridMinutes;
  });
}

RawSeries upsample_precip(const RawSeries& p) {
  if (p.resolution_minutes != 60) {
    throw ContractError("zero-insertion upsampling expects hourly input for '" + p.sensor + "'");
  }
  RawSeries out = p;
  out.resolution_minutes = kGridMinutes;
  out.timestamps.clear();
  out.values.clear();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (int q = 0; q < 4; ++q) {
      out.timestamps.push_back(p.timestamps[i] + q * kGridSeconds);
      out.values.push_back(q == 0 ? p.values[i] : 0.0);
    }
  }
  return out;
}

RawSeries preprocess_series(const RawSeries& raw, PipelineLog& log) {
  RawSeries s = regularize(raw);
  const std::string& name = s.sensor;
  if (s.kind == MetricKind::Precipitation) {
    std::size_t missing = 0;
    for (double& v : s.values) {
      if (std::isnan(v)) {
        v = 0.0;
        ++missing;
      }
    }
    log.stage(name, "zero-missing");
    if (missing > 0) log.note(name + ": " + std::to_string(missing) + " missing precipitation samples set to 0");
    if (s.resolution_minutes == 60) {
      log.stage(name, "upsample");
      return upsample_precip(s);
    }
    if (s.resolution_minutes == 1) {
      log.stage(name, "downsample-sum");
      return reduce_to_15min(s, &log, [](const double* v) {
        double sum = 0.0;
        for (int k = 0; k < kGridMinutes; ++k) sum += v[k];
        return sum;
      });
    }
    return s;
  }

  if (s.resolution_minutes == 60) {
    throw InputError(name + ": hourly resolution is only supported for precipitation");
  }
  std::vector<bool> mask = flag_missing_runs(s.values, run_threshold(s.resolution_minutes));
  std::size_t flagged = 0, absent = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    flagged += mask[i];
    absent += std::isnan(s.values[i]) ? 1 : 0;
  }
  log.stage(name, "flag");
  log.note(name + ": flagged " + std::to_string(flagged) + " samples in constant runs, " +
           std::to_string(absent) + " absent");
  s = spline_fill(s, mask);
  log.stage(name, "fill");
  if (s.resolution_minutes == 1) {
    s = downsample_to_15min(s, &log);
    log.stage(name, "downsample");
  }
  return s;
}

}  // namespace aquacast::data
