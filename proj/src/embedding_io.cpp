#include "cadence/embedding_io.hpp"

#include <bit>

#include "cadence/error.hpp"
#include "cadence/text.hpp"

namespace cadence {

std::filesystem::path embedding_index_path(const std::filesystem::path& path) {
    auto p = path;
    p += ".index.csv";
    return p;
}

void write_embeddings(const EmbeddingSeries& series, const std::filesystem::path& path) {
    const std::size_t dim = series.empty() ? 0 : series.front().vector.size();
    std::string bin = "cadence-embeddings 1 " + std::to_string(series.size()) + " " + std::to_string(dim) + "\n";
    std::string index = "subject_id,start_ms,label\n";
    bin.reserve(bin.size() + 4 * dim * series.size());
    for (const auto& r : series) {
        if (r.vector.size() != dim) throw Error(ErrorKind::ShapeMismatch, "embedding dimensions differ");
        for (float v : r.vector) {
            const auto bits = std::bit_cast<std::uint32_t>(v);
            for (int b = 0; b < 4; ++b) bin += static_cast<char>((bits >> (8 * b)) & 0xFF);
        }
        if (r.subject_id.find(',') != std::string::npos || (r.label && r.label->find(',') != std::string::npos)) {
            throw Error(ErrorKind::SchemaMismatch, "subject ids and labels may not contain commas");
        }
        index += r.subject_id + "," + std::to_string(r.start_time_ms) + "," + r.label.value_or("") + "\n";
    }
    text::write_file_atomic(path, bin);
    text::write_file_atomic(embedding_index_path(path), index);
}

EmbeddingSeries read_embeddings(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::Io, "no embeddings file at " + path.string());
    const std::string bin = text::read_file(path);
    const auto nl = bin.find('\n');
    if (nl == std::string::npos) throw Error(ErrorKind::SchemaMismatch, path.string() + ": missing header");
    const auto header = text::split_ws(std::string_view(bin).substr(0, nl));
    if (header.size() != 4 || header[0] != "cadence-embeddings" || header[1] != "1") {
        throw Error(ErrorKind::SchemaMismatch, path.string() + ": bad header");
    }
    const auto count = text::parse_int(header[2]);
    const auto dim = text::parse_int(header[3]);
    if (!count || !dim || *count < 0 || *dim < 0) throw Error(ErrorKind::SchemaMismatch, path.string() + ": bad header counts");
    const auto n = static_cast<std::size_t>(*count);
    const auto d = static_cast<std::size_t>(*dim);
    if (bin.size() - nl - 1 != 4 * n * d) throw Error(ErrorKind::SchemaMismatch, path.string() + ": payload size mismatch");

    const std::string idx = text::read_file(embedding_index_path(path));
    auto lines = text::split(idx, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty() || text::trim(lines[0]) != "subject_id,start_ms,label" || lines.size() != n + 1) {
        throw Error(ErrorKind::SchemaMismatch, embedding_index_path(path).string() + ": header or row count mismatch");
    }
    EmbeddingSeries out(n);
    const char* payload = bin.data() + nl + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const auto fields = text::split(text::trim(lines[i + 1]), ',');
        const auto start = fields.size() == 3 ? text::parse_int(fields[1]) : std::nullopt;
        if (!start) throw Error(ErrorKind::SchemaMismatch, embedding_index_path(path).string() + ": bad row " + std::to_string(i + 2));
        out[i].subject_id = std::string(fields[0]);
        out[i].start_time_ms = *start;
        if (!fields[2].empty()) out[i].label = std::string(fields[2]);
        out[i].vector.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) {
                bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(payload[4 * (i * d + j) + static_cast<std::size_t>(b)])) << (8 * b);
            }
            out[i].vector[j] = std::bit_cast<float>(bits);
        }
    }
    return out;
}

}  // namespace cadence
