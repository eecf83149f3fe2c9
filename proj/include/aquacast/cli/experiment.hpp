// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aquacast/data/dataset.hpp"
#include "aquacast/model/config.hpp"
#include "aquacast/train/trainer.hpp"

namespace aquacast::cli {

namespace fs = std::filesystem;

inline constexpr std::array<std::size_t, 4> kHorizons{96, 192, 480, 720};

/// Contents of a `--config` file:
///   {"model": {...}, "train": {...}, "targets": [...], "units": "standardized"}
/// Every key is optional; unknown keys raise ConfigError.
struct Overrides {
  model::ModelConfig model;
  train::TrainConfig train;
  std::vector<std::string> targets;  // empty = every endogenous channel
  train::Units units = train::Units::Standardized;
};

Overrides read_overrides(const fs::path& file);
Overrides overrides_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Overrides& o);

/// One cell of the experiment grid.
struct ExperimentSpec {
  fs::path dataset_root;
  data::RainConfig rain = data::RainConfig::RainFull;
  std::size_t horizon = 96;
  Overrides overrides;
  std::uint64_t seed = 0;
  fs::path out;

  void validate() const;
};

/// Explicit flag, else AQUACAST_SEED, else 0. A malformed variable is a UserError.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

std::size_t parse_horizon(const std::string& text);

/// Writes `<out>/run.json`: command, arguments, outputs relative to `out`,
/// and the creation time.
void write_run_index(const fs::path& out, const std::string& command, const nlohmann::json& args,
                     const std::vector<fs::path>& outputs);

/// Pretty JSON with a trailing newline.
void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

}  // namespace aquacast::cli
