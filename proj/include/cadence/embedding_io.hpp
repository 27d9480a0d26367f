#pragma once

#include <filesystem>

#include "cadence/probe.hpp"

namespace cadence {

// Binary file: one text line "cadence-embeddings 1 <count> <dim>\n" then
// count * dim little-endian float32 values, row by row. The sidecar
// `<path>.index.csv` holds `subject_id,start_ms,label` per row (empty label
// when the window carried none).
void write_embeddings(const EmbeddingSeries& series, const std::filesystem::path& path);
EmbeddingSeries read_embeddings(const std::filesystem::path& path);

std::filesystem::path embedding_index_path(const std::filesystem::path& path);

}  // namespace cadence
