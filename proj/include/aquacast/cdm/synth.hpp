// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "aquacast/cdm/clouds.hpp"
#include "aquacast/cdm/network.hpp"
#include "aquacast/cdm/terrain.hpp"

namespace aquacast::cdm {

/// Everything that defines one synthetic dataset. The presets SynthLow,
/// SynthMid and SynthHigh differ only in the cloud source.
struct SynthScenario {
  std::string name = "SynthMid";
  CloudKind source = CloudKind::Lorenz;
  Grid grid{64, 64};
  double cellsize = 10.0;
  FractalParams terrain;
  std::string terrain_file;  // ASCII grid; replaces the fractal terrain when set
  double detail = 6.0;
  WatershedLaw watershed;
  std::size_t network_nodes = 500;
  std::size_t terminals = 4;
  PipeLaw pipes;
  std::size_t n_nodes = 100;  // exported node series
  std::size_t steps = 10000;
  std::uint64_t seed = 0;
  double kappa = 1.0;         // intensity per unit cloud density
  double baseflow = 2e-5;     // mean dry-weather inflow per network node
  double diurnal = 0.3;       // relative amplitude of the daily dry-weather cycle
  RecordsCloudParams records;
  RecordGeneratorParams record_generator;
  std::string records_file;   // precipitation CSV; replaces the generator when set
  LorenzParams lorenz;
  RandomFieldParams random_field;

  /// "SynthLow" (records), "SynthMid" (Lorenz) or "SynthHigh" (random field).
  static SynthScenario preset(const std::string& name);
  void validate() const;
};

/// Nested objects per component; a "preset" key selects the base scenario
/// that the remaining keys override. Unknown keys raise ConfigError.
void to_json(nlohmann::json& j, const SynthScenario& s);
SynthScenario scenario_from_json(const nlohmann::json& j);

struct SynthDataset {
  SynthScenario scenario;
  std::vector<std::size_t> node_ids;                    // network ids of exported nodes
  std::vector<std::string> node_names;
  std::vector<std::vector<double>> flows;               // exported node series
  std::vector<double> precipitation;                    // total over all watersheds
  std::vector<std::vector<double>> watershed_rain;      // [watershed][step]
  std::size_t network_nodes = 0;
  std::vector<double> complexity;                       // per exported node
  double median_complexity = 0.0;
  double total_inflow = 0.0;  // local inflow into the network over the run
  double absorbed = 0.0;      // leaving through terminals
  double storage = 0.0;       // left inside pipes
};

/// Runs clouds -> watersheds -> pipes. Every random stream is derived from
/// the seed and a hash of the full scenario.
SynthDataset build_synth(const SynthScenario& s);

/// Writes one discharge CSV per exported node, `precipitation.csv`,
/// `dataset.json` and a `synth.json` manifest into `dir`.
void write_synth(const SynthDataset& d, const std::filesystem::path& dir);

double median(std::vector<double> v);

}  // namespace aquacast::cdm
