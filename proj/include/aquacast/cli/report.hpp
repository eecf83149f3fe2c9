// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace aquacast::cli {

inline constexpr const char* kAverageSensor = "average";

/// One sensor x horizon x config line of the results table.
struct ReportRow {
  std::string sensor;
  std::size_t horizon = 0;
  std::string config;  // NoRain, RainHist, RainFull
  std::string units;
  double mse = 0.0, mae = 0.0, rmse = 0.0;
  std::optional<double> r2;
  double auc = 0.0;
};

/// A forecast window drawn in the report: history, then truth vs forecast.
struct ForecastSample {
  std::string sensor;
  std::string config;
  std::size_t horizon = 0;
  std::string units;
  std::string start;  // timestamp of the first forecast step
  std::vector<double> history, truth, forecast;
};

/// Rows of every evaluation document plus one `average` row per
/// horizon x config, sorted by sensor, horizon and config. Duplicate cells
/// and mixed units raise InputError.
std::vector<ReportRow> collect_rows(const std::vector<nlohmann::json>& evals);
std::vector<ForecastSample> collect_samples(const std::vector<nlohmann::json>& evals);

std::string table_csv(const std::vector<ReportRow>& rows);
nlohmann::json table_json(const std::vector<ReportRow>& rows);

/// Standalone SVG line plot of one sample.
std::string forecast_svg(const ForecastSample& s);

/// File-name-safe form of a sample's identity.
std::string sample_file_name(const ForecastSample& s);

}  // namespace aquacast::cli
