// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/cli/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>

#include "aquacast/errors.hpp"

namespace aquacast::cli {

Overrides overrides_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  Overrides o;
  for (const auto& [key, value] : j.items()) {
    if (key == "model") {
      from_json(value, o.model);
    } else if (key == "train") {
      from_json(value, o.train);
    } else if (key == "targets") {
      o.targets = value.get<std::vector<std::string>>();
    } else if (key == "units") {
      o.units = train::parse_units(value.get<std::string>());
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return o;
}

Overrides read_overrides(const fs::path& file) {
  if (file.empty()) return {};
  return overrides_from_json(read_json(file));
}

nlohmann::json to_json(const Overrides& o) {
  return {{"model", o.model},
          {"train", o.train},
          {"targets", o.targets},
          {"units", train::units_name(o.units)}};
}

void ExperimentSpec::validate() const {
  if (dataset_root.empty()) throw UserError("no dataset: pass --dataset-root or --scenario");
  if (out.empty()) throw UserError("--out is required");
  if (std::find(kHorizons.begin(), kHorizons.end(), horizon) == kHorizons.end()) {
    throw ConfigError("horizon must be one of 96, 192, 480, 720 (got " + std::to_string(horizon) +
                      ")");
  }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  const char* env = std::getenv("AQUACAST_SEED");
  if (env == nullptr || *env == '\0') return 0;
  const std::string text(env);
  if (text.find_first_not_of("0123456789") != std::string::npos || text.size() > 20) {
    throw UserError("AQUACAST_SEED must be a non-negative integer, got '" + text + "'");
  }
  try {
    return std::stoull(text);
  } catch (const std::out_of_range&) {
    throw UserError("AQUACAST_SEED out of range: " + text);
  }
}

std::size_t parse_horizon(const std::string& text) {
  for (std::size_t h : kHorizons) {
    if (text == std::to_string(h)) return h;
  }
  throw ConfigError("horizon must be one of 96, 192, 480, 720 (got '" + text + "')");
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("cannot write " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_run_index(const fs::path& out, const std::string& command, const nlohmann::json& args,
                     const std::vector<fs::path>& outputs) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : outputs) files.push_back(p.lexically_relative(out).generic_string());
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
  write_json(out / "run.json", {{"command", command},
                                {"args", args},
                                {"outputs", files},
                                {"created", data::format_timestamp(secs.count())}});
}

}  // namespace aquacast::cli
