#pragma once

#include <cstdint>
#include <string>

#include "sgvi/potential_model.hpp"

namespace sgvi {

// Checkpoint file layout:
//
//   bytes 0..7   magic "SGVICKPT"
//   bytes 8..15  header length H, uint64 little-endian
//   next H bytes JSON header:
//                {"format": 1, "shape": {...}, "param_count": N,
//                 "config_hash": "<16 hex digits>", "maps": [...]}
//   next 8N      parameters, IEEE-754 binary64 little-endian
//
// config_hash is FNV-1a 64 over the canonical shape string; the loader
// recomputes it from the stored shape and rejects mismatches.
std::uint64_t shape_hash(const ModelShape& shape);
std::string canonical_shape(const ModelShape& shape);

std::string serialize_checkpoint(const PotentialModel& model);
PotentialModel deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const PotentialModel& model, const std::string& path);
// When `expected` is given the stored shape must equal it.
PotentialModel load_checkpoint(const std::string& path,
                               const ModelShape* expected = nullptr);

}  // namespace sgvi
