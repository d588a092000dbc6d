#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "mixreason/backbone.hpp"

namespace mixreason {

// Binary layout, all integers little-endian:
//   "CSMO" | u32 version | u64 header_len | header JSON (vocab, backbone
//   config, provenance) | u32 n_params | n_params x (u32 name_len | name |
//   u32 rows | u32 cols | rows*cols f32, row-major)
inline constexpr char kCheckpointMagic[4] = {'C', 'S', 'M', 'O'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  BackboneModel model;
  nlohmann::json provenance = nlohmann::json::object();
};

void save_checkpoint(std::ostream& out, const BackboneModel& model,
                     const nlohmann::json& provenance = nlohmann::json::object());
void save_checkpoint(const std::filesystem::path& path, const BackboneModel& model,
                     const nlohmann::json& provenance = nlohmann::json::object());

// Throws CheckpointError on any structural mismatch.
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json config_to_json(const BackboneConfig& config);
BackboneConfig config_from_json(const nlohmann::json& j);

}  // namespace mixreason
