#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "cadence/network.hpp"

namespace cadence {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    Network<float> network;
    AdamState<float> optimizer;
    std::int64_t step = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

// File layout: a plain-text manifest terminated by a line "end", followed by
// the payload of little-endian float32 arrays.
//
//   cadence-checkpoint 1
//   arch <Architecture::describe()>
//   step <n>
//   seed <n>
//   config_hash <hex>
//   adam <lr> <beta1> <beta2> <epsilon> <step>
//   tensor <name> <d0,d1,...> <byte offset> <byte length>   (one per array)
//   payload_bytes <n>
//   checksum <fnv1a-64 of payload, hex>
//   end
//
// Arrays are the network slots followed by adam.m.<slot> and adam.v.<slot>.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// Throws VersionMismatch for an unknown format version or when `expected`
// is given and the stored architecture differs; ChecksumMismatch for a
// truncated or corrupted payload.
Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<Architecture>& expected = std::nullopt);

// Parses Architecture::describe() output.
Architecture parse_architecture(const std::string& text);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL);

}  // namespace cadence
