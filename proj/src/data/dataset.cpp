// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "aquacast/data/csv.hpp"
#include "aquacast/errors.hpp"

namespace aquacast::data {

namespace fs = std::filesystem;

std::vector<SeriesEntry> discover_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw InputError("dataset root " + root.string() + " is not a directory");
  std::vector<SeriesEntry> entries;
  const fs::path index = root / "dataset.json";
  if (fs::exists(index)) {
    std::ifstream in(index);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      for (const auto& e : j.at("series")) {
        entries.push_back({e.at("file").get<std::string>(), e.at("sensor").get<std::string>(),
                           parse_kind(e.at("kind").get<std::string>())});
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(index.string() + ": " + e.what());
    }
  } else {
    for (const auto& de : fs::directory_iterator(root)) {
      if (!de.is_regular_file() || de.path().extension() != ".csv") continue;
      const std::string stem = de.path().stem().string();
      const bool rain = stem.rfind("precip", 0) == 0 || stem.rfind("rain", 0) == 0;
      entries.push_back({de.path().filename(), stem,
                         rain ? MetricKind::Precipitation : MetricKind::WaterHeight});
    }
    std::sort(entries.begin(), entries.end(),
              [](const SeriesEntry& a, const SeriesEntry& b) { return a.sensor < b.sensor; });
  }
  if (entries.empty()) throw InputError("no input series in " + root.string());
  return entries;
}

void write_dataset_index(const fs::path& root, const std::vector<SeriesEntry>& entries) {
  nlohmann::json j;
  auto& list = j["series"] = nlohmann::json::array();
  for (const auto& e : entries) {
    list.push_back({{"file", e.file.generic_string()}, {"sensor", e.sensor},
                    {"kind", std::string(kind_name(e.kind))}});
  }
  std::ofstream out(root / "dataset.json", std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("cannot write " + (root / "dataset.json").string());
}

const Channel* ProcessedDataset::precipitation() const {
  const Channel* found = nullptr;
  for (const auto& c : channels) {
    if (c.kind != MetricKind::Precipitation) continue;
    if (found) throw ConfigError("more than one precipitation channel");
    found = &c;
  }
  return found;
}

ProcessedDataset align(const std::vector<RawSeries>& processed, PipelineLog log) {
  if (processed.empty()) throw InputError("no input series");
  std::int64_t lo = processed.front().timestamps.front();
  std::int64_t hi = processed.front().timestamps.back();
  for (const auto& s : processed) {
    if (s.resolution_minutes != kGridMinutes || s.values.empty()) {
      throw ContractError("align expects non-empty 15-minute series");
    }
    lo = std::max(lo, s.timestamps.front());
    hi = std::min(hi, s.timestamps.back());
  }
  if (hi < lo) throw InputError("input series do not overlap in time");
  ProcessedDataset out;
  out.start = lo;
  for (const auto& s : processed) {
    const auto first = static_cast<std::size_t>((lo - s.timestamps.front()) / kGridSeconds);
    const auto count = static_cast<std::size_t>((hi - lo) / kGridSeconds) + 1;
    out.channels.push_back({s.sensor, s.kind,
                            std::vector<double>(s.values.begin() + first,
                                                s.values.begin() + first + count)});
  }
  log.stage("*", "align");
  log.note("aligned " + std::to_string(out.channels.size()) + " channels on " +
           std::to_string(out.length()) + " steps from " + format_timestamp(lo));
  out.log = std::move(log);
  return out;
}

ProcessedDataset load_dataset(const fs::path& root) {
  PipelineLog log;
  std::vector<RawSeries> processed;
  std::vector<int> native;
  for (const auto& e : discover_dataset(root)) {
    const RawSeries raw = read_series_csv(root / e.file, e.sensor, e.kind);
    native.push_back(raw.resolution_minutes);
    processed.push_back(preprocess_series(raw, log));
  }
  ProcessedDataset out = align(processed, std::move(log));
  for (std::size_t c = 0; c < native.size(); ++c) out.channels[c].native_resolution_minutes = native[c];
  return out;
}

std::string rain_name(RainConfig c) {
  switch (c) {
    case RainConfig::NoRain: return "none";
    case RainConfig::RainHist: return "hist";
    case RainConfig::RainFull: return "full";
  }
  return "none";
}

RainConfig parse_rain(std::string_view s) {
  if (s == "none") return RainConfig::NoRain;
  if (s == "hist") return RainConfig::RainHist;
  if (s == "full") return RainConfig::RainFull;
  throw ConfigError("rain configuration must be none, hist or full, not '" + std::string(s) + "'");
}

std::string config_label(RainConfig c) {
  switch (c) {
    case RainConfig::NoRain: return "NoRain";
    case RainConfig::RainHist: return "RainHist";
    case RainConfig::RainFull: return "RainFull";
  }
  return "NoRain";
}

Split Split::ratio_70_10_20(std::size_t n) {
  Split s;
  s.total = n;
  s.train_end = n * 7 / 10;
  s.val_end = s.train_end + n / 10;
  return s;
}

std::pair<std::size_t, std::size_t> part_range(const Split& s, Part p) {
  switch (p) {
    case Part::Train: return {0, s.train_end};
    case Part::Val: return {s.train_end, s.val_end};
    case Part::Test: return {s.val_end, s.total};
  }
  return {0, 0};
}

std::string part_name(Part p) {
  switch (p) {
    case Part::Train: return "train";
    case Part::Val: return "val";
    case Part::Test: return "test";
  }
  return "train";
}

std::size_t SeriesSet::n_endogenous() const {
  return config == RainConfig::NoRain ? history.size() : history.size() - 1;
}

SeriesSet assemble(const ProcessedDataset& data, RainConfig config,
                   const std::vector<std::string>& targets) {
  SeriesSet set;
  set.config = config;
  set.start = data.start;
  set.split = Split::ratio_70_10_20(data.length());

  std::vector<std::vector<double>> raw;
  for (const auto& c : data.channels) {
    if (c.kind == MetricKind::Precipitation) continue;
    set.history_names.push_back(c.name);
    raw.push_back(c.values);
  }
  if (raw.empty()) throw ConfigError("dataset has no endogenous channels");
  const std::size_t endogenous = raw.size();
  if (config != RainConfig::NoRain) {
    const Channel* rain = data.precipitation();
    if (!rain) {
      throw ConfigError("rain configuration '" + rain_name(config) +
                        "' needs a precipitation channel");
    }
    set.history_names.push_back(rain->name);
    raw.push_back(rain->values);
  }

  if (targets.empty()) {
    for (std::size_t i = 0; i < endogenous; ++i) set.targets.push_back(i);
  } else {
    for (const auto& t : targets) {
      const auto it = std::find(set.history_names.begin(), set.history_names.begin() + endogenous, t);
      if (it == set.history_names.begin() + endogenous) {
        throw ConfigError("unknown target channel '" + t + "'");
      }
      set.targets.push_back(static_cast<std::size_t>(it - set.history_names.begin()));
    }
  }

  set.stats = Standardizer::fit(set.history_names, raw, set.split.train_end);
  for (std::size_t c = 0; c < raw.size(); ++c) set.history.push_back(set.stats.standardize(c, raw[c]));
  if (config == RainConfig::RainFull) {
    // The forecast channel is the same physical quantity as rain history and
    // reuses its statistics.
    set.forecast_stats = endogenous;
    set.forecast.push_back(set.history.back());
  }
  return set;
}

Summary summarize(std::span<const double> values, std::size_t bins) {
  if (values.empty()) throw ContractError("summary of an empty channel");
  if (bins == 0) throw ContractError("summary needs at least one bin");
  Summary s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / n);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  s.lo = lo;
  s.bin_width = (hi - lo) / static_cast<double>(bins);
  s.density.assign(bins, 0.0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / s.bin_width);
    s.density[std::min(b, bins - 1)] += 1.0;
  }
  for (double& d : s.density) d /= n * s.bin_width;
  return s;
}

nlohmann::json dataset_manifest(const ProcessedDataset& data, const Split& split,
                                const std::vector<SeriesEntry>& entries) {
  nlohmann::json j;
  j["grid_minutes"] = kGridMinutes;
  j["start"] = format_timestamp(data.start);
  j["length"] = data.length();
  j["split"] = {{"train_end", split.train_end}, {"val_end", split.val_end}, {"total", split.total}};
  auto& channels = j["channels"] = nlohmann::json::array();
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  for (std::size_t c = 0; c < data.channels.size(); ++c) {
    const Channel& ch = data.channels[c];
    const bool rain = ch.kind == MetricKind::Precipitation;
    nlohmann::json e{{"name", ch.name},
                     {"kind", std::string(kind_name(ch.kind))},
                     {"role", rain ? "exogenous" : "endogenous-target"},
                     {"native_resolution_minutes", ch.native_resolution_minutes}};
    for (const auto& entry : entries) {
      if (entry.sensor == ch.name) e["file"] = entry.file.generic_string();
    }
    channels.push_back(std::move(e));
    names.push_back(ch.name);
    values.push_back(ch.values);
  }
  j["standardizer"] = Standardizer::fit(names, values, split.train_end);
  j["stages"] = data.log.stages;
  j["log"] = data.log.entries;
  return j;
}

}  // namespace aquacast::data
