#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "nelson/multiscale.hpp"

namespace nelson {

// Binary vector format: magic "NMSV", u32 version = 1, u64 dimension,
// u8 scalar kind (0 = real64, 1 = complex128), little-endian payload.
void write_nmv(const std::string& path, const VectorX& v);
void write_nmv(const std::string& path, const VectorXc& v);
VectorX read_nmv(const std::string& path);

nlohmann::json grid_to_json(const ModeGrid& grid);
nlohmann::json basis_to_json(const FockBasis& basis);

nlohmann::json record_to_json(const GroundStateRecord& rec,
                              const std::string& config_hash,
                              const std::optional<std::string>& vector_file);
GroundStateRecord record_from_json(const nlohmann::json& j);

nlohmann::json dressed_to_json(const DressedState& ds,
                               const std::string& config_hash);
DressedState dressed_from_json(const nlohmann::json& j);

}  // namespace nelson
