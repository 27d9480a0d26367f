#include "cadence/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "cadence/checkpoint.hpp"
#include "cadence/error.hpp"
#include "cadence/text.hpp"

namespace cadence {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw Error(ErrorKind::Config, "invalid value for " + key + ": '" + value + "'");
}

double as_double(const std::string& key, const std::string& value) {
    const auto v = text::parse_double(value);
    if (!v) bad_value(key, value);
    return *v;
}

std::int64_t as_int(const std::string& key, const std::string& value) {
    const auto v = text::parse_int(value);
    if (!v) bad_value(key, value);
    return *v;
}

int as_int32(const std::string& key, const std::string& value) {
    const auto v = as_int(key, value);
    if (v < INT32_MIN || v > INT32_MAX) bad_value(key, value);
    return static_cast<int>(v);
}

std::uint64_t as_seed(const std::string& key, const std::string& value) {
    const auto v = as_int(key, value);
    if (v < 0) bad_value(key, value);
    return static_cast<std::uint64_t>(v);
}

bool as_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    bad_value(key, value);
}

std::vector<int> as_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (auto part : text::split(value, ',')) out.push_back(as_int32(key, std::string(text::trim(part))));
    if (out.empty()) bad_value(key, value);
    return out;
}

std::string list(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

// Shortest text that reads back to the same double.
std::string num(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string train_shape_text(const TrainConfig& t) {
    std::ostringstream out;
    out << "train.seed=" << t.seed << "\n"
        << "pairing.delta_t_s=" << num(t.pairing.delta_t_s) << "\n"
        << "pairing.mode_mix=" << num(t.pairing.mode_mix) << "\n"
        << "pairing.batch_b=" << t.pairing.batch_b << "\n"
        << "optim.lr=" << num(t.adam.lr) << "\n"
        << "optim.beta1=" << num(t.adam.beta1) << "\n"
        << "optim.beta2=" << num(t.adam.beta2) << "\n"
        << "optim.epsilon=" << num(t.adam.epsilon) << "\n"
        << "model.widths=" << list(t.arch.widths) << "\n"
        << "model.kernel=" << t.arch.kernel << "\n"
        << "model.stride=" << t.arch.stride << "\n"
        << "model.embed_dim=" << t.arch.embed_dim << "\n"
        << "model.projector_hidden=" << t.arch.projector_hidden << "\n";
    const auto& r = t.ranges;
    out << "augment.median_widths=" << list(r.median_widths) << "\n"
        << "augment.translate_min=" << r.translate_min << "\n"
        << "augment.translate_max=" << r.translate_max << "\n"
        << "augment.jump_min=" << num(r.jump_min) << "\n"
        << "augment.jump_max=" << num(r.jump_max) << "\n"
        << "augment.wander_amp_min=" << num(r.wander_amp_min) << "\n"
        << "augment.wander_amp_max=" << num(r.wander_amp_max) << "\n"
        << "augment.wander_period_min_s=" << num(r.wander_period_min_s) << "\n"
        << "augment.wander_period_max_s=" << num(r.wander_period_max_s) << "\n"
        << "augment.noise_min=" << num(r.noise_min) << "\n"
        << "augment.noise_max=" << num(r.noise_max) << "\n"
        << "augment.rotation_mode=" << (r.rotation_mode == RotationMode::Planar ? "planar" : "3axis") << "\n"
        << "augment.chain_min=" << r.chain_min << "\n"
        << "augment.chain_max=" << r.chain_max << "\n";
    return out.str();
}

}  // namespace

void apply_setting(Settings& s, const std::string& key, const std::string& value) {
    auto& t = s.train;
    auto& r = t.ranges;
    auto& p = s.probe;
    if (key == "train.steps") t.steps = as_int(key, value);
    else if (key == "train.seed") t.seed = as_seed(key, value);
    else if (key == "train.checkpoint_interval") t.checkpoint_interval = as_int(key, value);
    else if (key == "train.prefetch") t.prefetch = as_bool(key, value);
    else if (key == "pairing.delta_t_s") t.pairing.delta_t_s = as_double(key, value);
    else if (key == "pairing.mode_mix") t.pairing.mode_mix = as_double(key, value);
    else if (key == "pairing.batch_b") t.pairing.batch_b = as_int32(key, value);
    else if (key == "optim.lr") t.adam.lr = as_double(key, value);
    else if (key == "optim.beta1") t.adam.beta1 = as_double(key, value);
    else if (key == "optim.beta2") t.adam.beta2 = as_double(key, value);
    else if (key == "optim.epsilon") t.adam.epsilon = as_double(key, value);
    else if (key == "model.widths") t.arch.widths = as_int_list(key, value);
    else if (key == "model.kernel") t.arch.kernel = as_int32(key, value);
    else if (key == "model.stride") t.arch.stride = as_int32(key, value);
    else if (key == "model.embed_dim") t.arch.embed_dim = as_int32(key, value);
    else if (key == "model.projector_hidden") t.arch.projector_hidden = as_int32(key, value);
    else if (key == "augment.median_widths") r.median_widths = as_int_list(key, value);
    else if (key == "augment.translate_min") r.translate_min = as_int32(key, value);
    else if (key == "augment.translate_max") r.translate_max = as_int32(key, value);
    else if (key == "augment.jump_min") r.jump_min = as_double(key, value);
    else if (key == "augment.jump_max") r.jump_max = as_double(key, value);
    else if (key == "augment.wander_amp_min") r.wander_amp_min = as_double(key, value);
    else if (key == "augment.wander_amp_max") r.wander_amp_max = as_double(key, value);
    else if (key == "augment.wander_period_min_s") r.wander_period_min_s = as_double(key, value);
    else if (key == "augment.wander_period_max_s") r.wander_period_max_s = as_double(key, value);
    else if (key == "augment.noise_min") r.noise_min = as_double(key, value);
    else if (key == "augment.noise_max") r.noise_max = as_double(key, value);
    else if (key == "augment.rotation_mode") {
        if (value == "planar") r.rotation_mode = RotationMode::Planar;
        else if (value == "3axis") r.rotation_mode = RotationMode::ThreeAxis;
        else bad_value(key, value);
    }
    else if (key == "augment.chain_min") r.chain_min = as_int32(key, value);
    else if (key == "augment.chain_max") r.chain_max = as_int32(key, value);
    else if (key == "probe.n_values") p.n_values = as_int_list(key, value);
    else if (key == "probe.repeats") p.repeats = as_int32(key, value);
    else if (key == "probe.train_fraction") p.train_fraction = as_double(key, value);
    else if (key == "probe.seed") p.seed = as_seed(key, value);
    else if (key == "probe.l2_c") p.l2_c = as_double(key, value);
    else if (key == "probe.full_split") p.full_split = as_bool(key, value);
    else throw Error(ErrorKind::Config, "unknown configuration key '" + key + "'");
}

Settings parse_settings(const std::string& contents, Settings base) {
    std::set<std::string> seen;
    const auto lines = text::split(contents, '\n');
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = lines[i];
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::Config, "line " + std::to_string(i + 1) + ": expected key=value");
        }
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string value(text::trim(line.substr(eq + 1)));
        if (!seen.insert(key).second) throw Error(ErrorKind::Config, "duplicate key '" + key + "'");
        apply_setting(base, key, value);
    }
    base.train.validate();
    base.probe.validate();
    return base;
}

std::string settings_to_text(const Settings& s) {
    std::ostringstream out;
    out << "train.steps=" << s.train.steps << "\n"
        << "train.checkpoint_interval=" << s.train.checkpoint_interval << "\n"
        << "train.prefetch=" << (s.train.prefetch ? "true" : "false") << "\n"
        << train_shape_text(s.train);
    out << "probe.n_values=" << list(s.probe.n_values) << "\n"
        << "probe.repeats=" << s.probe.repeats << "\n"
        << "probe.train_fraction=" << num(s.probe.train_fraction) << "\n"
        << "probe.seed=" << s.probe.seed << "\n"
        << "probe.l2_c=" << num(s.probe.l2_c) << "\n"
        << "probe.full_split=" << (s.probe.full_split ? "true" : "false") << "\n";
    return out.str();
}

std::uint64_t config_hash(const TrainConfig& config) { return fnv1a64(train_shape_text(config)); }

}  // namespace cadence
