// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "aquacast/model/config.hpp"
#include "aquacast/model/params.hpp"

namespace aquacast::model {

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  nlohmann::json meta = nlohmann::json::object();  // free-form (standardizer, targets, ...)
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout: 8-byte magic "AQUACAST", u32 version, u64 header length, JSON header
// (config, meta, parameter table with name/shape/offset), then all parameter
// values as little-endian IEEE-754 doubles in table order.

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace aquacast::model
