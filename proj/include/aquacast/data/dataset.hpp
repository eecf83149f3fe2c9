// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aquacast/data/preprocess.hpp"
#include "aquacast/data/series.hpp"
#include "aquacast/data/standardizer.hpp"

namespace aquacast::data {

/// One file listed in a dataset root.
struct SeriesEntry {
  std::filesystem::path file;  // relative to the root
  std::string sensor;
  MetricKind kind = MetricKind::WaterHeight;
};

/// Lists the series of a dataset root. Uses `dataset.json` when present,
/// otherwise every `*.csv` (files whose stem starts with "precip" or "rain"
/// are precipitation, the rest water height). Throws InputError("no input
/// series") for an empty root.
std::vector<SeriesEntry> discover_dataset(const std::filesystem::path& root);

/// Writes the `dataset.json` index for `entries`.
void write_dataset_index(const std::filesystem::path& root, const std::vector<SeriesEntry>& entries);

struct Channel {
  std::string name;
  MetricKind kind = MetricKind::WaterHeight;
  std::vector<double> values;
  int native_resolution_minutes = kGridMinutes;
};

/// Gap-free channels on one shared 15-minute grid.
struct ProcessedDataset {
  std::int64_t start = 0;
  std::vector<Channel> channels;
  PipelineLog log;

  std::size_t length() const { return channels.empty() ? 0 : channels.front().values.size(); }
  const Channel* precipitation() const;
};

/// Preprocesses every channel and trims them to their common time span.
ProcessedDataset align(const std::vector<RawSeries>& processed, PipelineLog log);

/// discover -> read -> preprocess_series -> align.
ProcessedDataset load_dataset(const std::filesystem::path& root);

enum class RainConfig { NoRain, RainHist, RainFull };
std::string rain_name(RainConfig c);  // "none", "hist", "full"
RainConfig parse_rain(std::string_view s);
std::string config_label(RainConfig c);  // "NoRain", "RainHist", "RainFull"

/// Chronological 70/10/20 partition: train = floor(0.7 n), val = floor(0.1 n),
/// test = remainder.
struct Split {
  std::size_t train_end = 0;
  std::size_t val_end = 0;
  std::size_t total = 0;

  static Split ratio_70_10_20(std::size_t n);
  bool operator==(const Split&) const = default;
};

enum class Part { Train, Val, Test };
std::pair<std::size_t, std::size_t> part_range(const Split& s, Part p);
std::string part_name(Part p);

/// Model-ready standardized channels for one rain configuration.
struct SeriesSet {
  RainConfig config = RainConfig::NoRain;
  std::int64_t start = 0;
  Split split;
  std::vector<std::string> history_names;        // V channels, endogenous first
  std::vector<std::vector<double>> history;      // standardized, V x length
  std::vector<std::vector<double>> forecast;     // standardized, F x length (F <= 1)
  std::vector<std::size_t> targets;              // indices into history
  Standardizer stats;                            // one entry per history channel
  std::size_t forecast_stats = 0;                // stats index used by the forecast channel

  std::size_t length() const { return history.empty() ? 0 : history.front().size(); }
  std::size_t n_endogenous() const;
};

/// Selects channels for `config`, splits, and standardizes with training
/// statistics. `targets` names endogenous channels; empty means all of them.
/// Rain configurations without a precipitation channel throw ConfigError.
SeriesSet assemble(const ProcessedDataset& data, RainConfig config,
                   const std::vector<std::string>& targets = {});

struct Summary {
  double mean = 0.0;
  double std = 0.0;
  double lo = 0.0;          // left edge of the first bin
  double bin_width = 0.0;
  std::vector<double> density;  // integrates to 1 over the bins
};

/// Moments and a normalized histogram. A constant channel falls into a
/// single bin of a unit-width range centred on the value.
Summary summarize(std::span<const double> values, std::size_t bins = 50);

nlohmann::json dataset_manifest(const ProcessedDataset& data, const Split& split,
                                const std::vector<SeriesEntry>& entries);

}  // namespace aquacast::data
