// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aquacast/cdm/synth.hpp"
#include "aquacast/cli/experiment.hpp"

namespace aquacast::cli {

/// Reads every series under `input`, writes the processed 15-minute channels
/// as a new dataset root in `out` with `manifest.json` and per-channel
/// histograms, and prints one summary line per channel.
nlohmann::json cmd_preprocess(const fs::path& input, const fs::path& out, std::ostream& log);

/// A scenario JSON file, or one of the preset names.
cdm::SynthScenario load_scenario(const std::string& scenario);

/// Builds the synthetic dataset into `out` and prints the complexity summary.
nlohmann::json cmd_synth(const cdm::SynthScenario& s, const fs::path& out, std::ostream& log);

/// Trains one grid cell; writes `checkpoint.bin` and `manifest.json`.
nlohmann::json cmd_train(const ExperimentSpec& spec, std::ostream& log);

struct EvalArgs {
  fs::path checkpoint;
  fs::path dataset_root;                // empty: the root recorded in the checkpoint
  data::Part split = data::Part::Test;
  std::optional<train::Units> units;    // empty: the units chosen at training time
  fs::path out;
};

/// Writes `eval.json`: metrics per target and one sample window per target.
nlohmann::json cmd_eval(const EvalArgs& a, std::ostream& log);

/// Aggregates `eval.json` files (directories are searched recursively) into
/// `report.csv`, `report.json` and `plots/*.svg`.
nlohmann::json cmd_report(const std::vector<fs::path>& inputs, const fs::path& out,
                          std::ostream& log);

struct GridArgs {
  ExperimentSpec base;  // dataset root, overrides, seed and output directory
  std::optional<cdm::SynthScenario> scenario;  // synthesized into <out>/dataset
  std::vector<std::size_t> horizons{kHorizons.begin(), kHorizons.end()};
  std::vector<data::RainConfig> rains{data::RainConfig::NoRain, data::RainConfig::RainHist,
                                      data::RainConfig::RainFull};
  std::size_t jobs = 1;
};

/// Train + test evaluation for every rain config x horizon, then the report
/// in `<out>/report`. With jobs > 1 cells run in forked worker processes.
nlohmann::json cmd_grid(const GridArgs& a, std::ostream& log);

std::string cell_name(data::RainConfig rain, std::size_t horizon);

}  // namespace aquacast::cli
