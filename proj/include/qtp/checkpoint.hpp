#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qtp/gnn.hpp"

namespace qtp {

struct Checkpoint {
  Model model;
  std::uint64_t seed = 0;
  nlohmann::json metadata = nlohmann::json::object();  // epochs, fold id, ...

  bool operator==(const Checkpoint&) const = default;
};

// Layout: "QTPCKPT\0", u32 version, u64 header length, JSON header
// {config, seed, metadata, params:[{name, shape, offset}]}, then the
// parameters as little-endian float64 in manifest order.
std::string serialize_checkpoint(const Checkpoint& c);
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qtp
