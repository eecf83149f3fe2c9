// Copyright 2026 The AquaCast Authors
// SPDX-License-Identifier: Apache-2.0

#include "aquacast/model/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "aquacast/errors.hpp"

namespace aquacast::model {
namespace {

constexpr std::array<char, 8> kMagic{'A', 'Q', 'U', 'A', 'C', 'A', 'S', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw InputError("checkpoint truncated");
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  nlohmann::json header;
  header["config"] = ck.config;
  header["meta"] = ck.meta;
  auto& table = header["params"] = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& [name, array] : ck.params.tensors) {
    table.push_back({{"name", name}, {"shape", array.shape}, {"offset", offset}});
    offset += array.size();
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  out.write(kMagic.data(), kMagic.size());
  write_pod(out, kCheckpointVersion);
  write_pod(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [_, array] : ck.params.tensors) {
    out.write(reinterpret_cast<const char*>(array.values.data()),
              static_cast<std::streamsize>(array.values.size() * sizeof(double)));
  }
  if (!out) throw InputError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("missing checkpoint " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InputError(path.string() + " is not an AquaCast checkpoint");
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw InputError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = read_pod<std::uint64_t>(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw InputError("checkpoint truncated");
  const auto header = nlohmann::json::parse(text);

  Checkpoint ck;
  ck.config = header.at("config").get<ModelConfig>();
  ck.meta = header.value("meta", nlohmann::json::object());
  for (const auto& entry : header.at("params")) {
    ad::Array a(entry.at("shape").get<ad::Shape>(), 0.0);
    in.read(reinterpret_cast<char*>(a.values.data()),
            static_cast<std::streamsize>(a.values.size() * sizeof(double)));
    if (!in) throw InputError("checkpoint truncated in parameter data");
    ck.params.tensors.emplace(entry.at("name").get<std::string>(), std::move(a));
  }
  // Shapes must agree with the configuration.
  const auto expected = parameter_shapes(ck.config);
  if (expected.size() != ck.params.tensors.size()) {
    throw InputError("checkpoint parameter table does not match its config");
  }
  for (const auto& [name, shape] : expected) {
    auto it = ck.params.tensors.find(name);
    if (it == ck.params.tensors.end() || it->second.shape != shape) {
      throw InputError("checkpoint parameter '" + name + "' does not match its config");
    }
  }
  return ck;
}

}  // namespace aquacast::model
