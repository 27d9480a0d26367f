#include "cadence/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <sstream>

#include "cadence/error.hpp"
#include "cadence/text.hpp"

namespace cadence {

namespace {

static_assert(sizeof(float) == 4);

void append_floats(std::string& out, const float* data, std::size_t n) {
    const std::size_t start = out.size();
    out.resize(start + 4 * n);
    for (std::size_t i = 0; i < n; ++i) {
        auto bits = std::bit_cast<std::uint32_t>(data[i]);
        for (int b = 0; b < 4; ++b) out[start + 4 * i + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
}

void read_floats(std::string_view in, float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[4 * i + static_cast<std::size_t>(b)])) << (8 * b);
        data[i] = std::bit_cast<float>(bits);
    }
}

std::string hex(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string shape_text(const std::vector<int>& shape) {
    std::string s;
    for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
    return s;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash) {
    for (char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

Architecture parse_architecture(const std::string& textual) {
    Architecture a;
    a.widths.clear();
    for (auto field : text::split(textual, ';')) {
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) throw Error(ErrorKind::VersionMismatch, "bad architecture field");
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        auto as_int = [&](std::string_view v) {
            const auto x = text::parse_int(v);
            if (!x) throw Error(ErrorKind::VersionMismatch, "bad architecture value");
            return static_cast<int>(*x);
        };
        if (key == "in") {
            const auto x = value.find('x');
            if (x == std::string_view::npos) throw Error(ErrorKind::VersionMismatch, "bad input shape");
            a.input_channels = as_int(value.substr(0, x));
            a.input_length = as_int(value.substr(x + 1));
        } else if (key == "widths") {
            for (auto w : text::split(value, ',')) a.widths.push_back(as_int(w));
        } else if (key == "kernel") {
            a.kernel = as_int(value);
        } else if (key == "stride") {
            a.stride = as_int(value);
        } else if (key == "embed") {
            a.embed_dim = as_int(value);
        } else if (key == "hidden") {
            a.projector_hidden = as_int(value);
        } else {
            throw Error(ErrorKind::VersionMismatch, "unknown architecture field");
        }
    }
    return a;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const auto& net = ckpt.network;
    const auto& opt = ckpt.optimizer;
    if (opt.m.size() != net.params.size() || opt.v.size() != net.params.size()) {
        throw Error(ErrorKind::ShapeMismatch, "optimizer state does not match network");
    }
    std::string payload;
    payload.reserve(12 * net.params.size());
    std::ostringstream tensors;
    auto emit = [&](const std::string& name, const ParamSlot& slot, const std::vector<float>& source) {
        const std::size_t offset = payload.size();
        append_floats(payload, source.data() + slot.offset, slot.size);
        tensors << "tensor " << name << " " << shape_text(slot.shape) << " " << offset << " " << 4 * slot.size << "\n";
    };
    for (const auto& s : net.layout.slots) emit(s.name, s, net.params);
    for (const auto& s : net.layout.slots) emit("adam.m." + s.name, s, opt.m);
    for (const auto& s : net.layout.slots) emit("adam.v." + s.name, s, opt.v);

    std::ostringstream head;
    head << "cadence-checkpoint " << kCheckpointVersion << "\n"
         << "arch " << net.arch.describe() << "\n"
         << "step " << ckpt.step << "\n"
         << "seed " << ckpt.seed << "\n"
         << "config_hash " << hex(ckpt.config_hash) << "\n"
         << "adam " << text::format_double(opt.config.lr) << " " << text::format_double(opt.config.beta1) << " "
         << text::format_double(opt.config.beta2) << " " << text::format_double(opt.config.epsilon) << " " << opt.step
         << "\n"
         << tensors.str() << "payload_bytes " << payload.size() << "\n"
         << "checksum " << hex(fnv1a64(payload)) << "\n"
         << "end\n";
    text::write_file_atomic(path, head.str() + payload);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<Architecture>& expected) {
    const std::string bytes = text::read_file(path);
    const auto end_marker = bytes.find("\nend\n");
    if (end_marker == std::string::npos) throw Error(ErrorKind::ChecksumMismatch, path.string() + ": manifest incomplete");
    const std::string_view manifest(bytes.data(), end_marker + 1);
    const std::string_view payload(bytes.data() + end_marker + 5, bytes.size() - end_marker - 5);

    Checkpoint ckpt;
    std::optional<Architecture> arch;
    std::size_t payload_bytes = 0;
    std::uint64_t checksum = 0;
    struct TensorEntry {
        std::string name;
        std::size_t offset;
        std::size_t length;
        std::string shape;
    };
    std::vector<TensorEntry> entries;
    bool have_version = false;
    for (auto line : text::split(manifest, '\n')) {
        if (line.empty()) continue;
        const auto fields = text::split_ws(line);
        const auto key = fields[0];
        auto need = [&](std::size_t n) {
            if (fields.size() != n) throw Error(ErrorKind::VersionMismatch, path.string() + ": malformed manifest line");
        };
        if (key == "cadence-checkpoint") {
            need(2);
            if (text::parse_int(fields[1]) != kCheckpointVersion) {
                throw Error(ErrorKind::VersionMismatch, path.string() + ": unsupported format version");
            }
            have_version = true;
        } else if (key == "arch") {
            need(2);
            arch = parse_architecture(std::string(fields[1]));
        } else if (key == "step") {
            need(2);
            ckpt.step = text::parse_int(fields[1]).value_or(0);
        } else if (key == "seed") {
            need(2);
            ckpt.seed = std::stoull(std::string(fields[1]));
        } else if (key == "config_hash") {
            need(2);
            ckpt.config_hash = std::stoull(std::string(fields[1]), nullptr, 16);
        } else if (key == "adam") {
            need(6);
            ckpt.optimizer.config = {text::parse_double(fields[1]).value_or(0), text::parse_double(fields[2]).value_or(0),
                                     text::parse_double(fields[3]).value_or(0), text::parse_double(fields[4]).value_or(0)};
            ckpt.optimizer.step = text::parse_int(fields[5]).value_or(0);
        } else if (key == "tensor") {
            need(5);
            entries.push_back({std::string(fields[1]), static_cast<std::size_t>(text::parse_int(fields[3]).value_or(-1)),
                               static_cast<std::size_t>(text::parse_int(fields[4]).value_or(-1)), std::string(fields[2])});
        } else if (key == "payload_bytes") {
            need(2);
            payload_bytes = static_cast<std::size_t>(text::parse_int(fields[1]).value_or(-1));
        } else if (key == "checksum") {
            need(2);
            checksum = std::stoull(std::string(fields[1]), nullptr, 16);
        } else {
            throw Error(ErrorKind::VersionMismatch, path.string() + ": unknown manifest key");
        }
    }
    if (!have_version || !arch) throw Error(ErrorKind::VersionMismatch, path.string() + ": missing header");
    if (payload.size() != payload_bytes || fnv1a64(payload) != checksum) {
        throw Error(ErrorKind::ChecksumMismatch, path.string() + ": payload does not match manifest");
    }
    if (expected && !(*expected == *arch)) {
        throw Error(ErrorKind::VersionMismatch, "checkpoint architecture '" + arch->describe() + "' differs from '" +
                                                    expected->describe() + "'");
    }

    ckpt.network = Network<float>::zeros(*arch);
    ckpt.optimizer.m.assign(ckpt.network.params.size(), 0.0f);
    ckpt.optimizer.v.assign(ckpt.network.params.size(), 0.0f);
    const auto& layout = ckpt.network.layout;
    if (entries.size() != 3 * layout.slots.size()) {
        throw Error(ErrorKind::VersionMismatch, path.string() + ": tensor list does not match architecture");
    }
    std::size_t e = 0;
    for (std::vector<float>* target : {&ckpt.network.params, &ckpt.optimizer.m, &ckpt.optimizer.v}) {
        const std::string prefix = target == &ckpt.network.params ? "" : target == &ckpt.optimizer.m ? "adam.m." : "adam.v.";
        for (const auto& slot : layout.slots) {
            const auto& entry = entries[e++];
            if (entry.name != prefix + slot.name || entry.shape != shape_text(slot.shape) || entry.length != 4 * slot.size ||
                entry.offset + entry.length > payload.size()) {
                throw Error(ErrorKind::VersionMismatch, path.string() + ": tensor " + entry.name + " does not match layout");
            }
            read_floats(payload.substr(entry.offset, entry.length), target->data() + slot.offset, slot.size);
        }
    }
    return ckpt;
}

}  // namespace cadence
