#include "cadence/synth.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "cadence/error.hpp"
#include "cadence/random.hpp"

namespace cadence {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Uniform random rotation from a unit quaternion.
Mat3 random_rotation(Rng& rng) {
    double q[4];
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& v : q) {
            v = gaussian(rng);
            norm += v * v;
        }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (double& v : q) v /= norm;
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
             {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
             {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

// Classes share one motion profile and differ only in cadence, so window
// means and spreads say little about the class.
constexpr std::array<double, 6> kClassHz{1.0, 2.0, 3.1, 1.5, 2.5, 3.7};
constexpr std::array<std::array<double, 3>, 3> kHarmonics{{{1.0, 0.5, 0.3}, {0.35, 0.6, 0.2}, {0.15, 0.1, 0.4}}};

double class_hz(int k) {
    const auto i = static_cast<std::size_t>(k);
    return kClassHz[i % kClassHz.size()] * (1.0 + 0.12 * static_cast<double>(i / kClassHz.size()));
}

// Pose of the wrist during one stretch of a bout.
struct Pose {
    Mat3 rotation;
    double amplitude;
};

Vec3 rotate(const Mat3& m, const std::array<double, 3>& v) {
    Vec3 out{};
    for (std::size_t r = 0; r < 3; ++r) out[r] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2];
    return out;
}

// Orientation and intensity are redrawn every 5-15 s (with a 1 s crossfade);
// the cadence stays fixed for the whole bout.
void append_bout(std::vector<Vec3>& out, Rng& rng, std::size_t count, std::optional<double> hz) {
    const bool null_gap = !hz;
    const double lo = null_gap ? 0.02 : 0.15;
    const double hi = null_gap ? 0.08 : 0.8;
    const double f = null_gap ? 0.0 : *hz * uniform(rng, 0.9, 1.1);
    const double noise = uniform(rng, 0.01, 0.06);
    std::array<double, 3> phase{};
    for (double& p : phase) p = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const std::size_t fade = static_cast<std::size_t>(kTargetRateHz);
    Pose prev{random_rotation(rng), uniform(rng, lo, hi)};
    Pose cur = prev;
    std::size_t since_change = fade;
    std::size_t next_change = static_cast<std::size_t>(uniform(rng, 5.0, 15.0) * kTargetRateHz);
    for (std::size_t i = 0; i < count; ++i) {
        if (since_change == next_change) {
            prev = cur;
            cur = {random_rotation(rng), uniform(rng, lo, hi)};
            since_change = 0;
            next_change = static_cast<std::size_t>(uniform(rng, 5.0, 15.0) * kTargetRateHz);
        }
        const double t = static_cast<double>(i) / kTargetRateHz;
        std::array<double, 3> motion{};
        if (null_gap) {
            for (double& v : motion) v = gaussian(rng);
        } else {
            for (std::size_t h = 0; h < 3; ++h) {
                const double s = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(h + 1) * t + phase[h]);
                for (std::size_t a = 0; a < 3; ++a) motion[a] += kHarmonics[h][a] * s;
            }
        }
        auto pose_signal = [&](const Pose& p) {
            std::array<double, 3> local{p.amplitude * motion[0], p.amplitude * motion[1], 1.0 + p.amplitude * motion[2]};
            return rotate(p.rotation, local);
        };
        Vec3 v = pose_signal(cur);
        if (since_change < fade) {
            const double alpha = static_cast<double>(since_change) / static_cast<double>(fade);
            const Vec3 old = pose_signal(prev);
            for (std::size_t a = 0; a < 3; ++a) v[a] = alpha * v[a] + (1.0 - alpha) * old[a];
        }
        for (double& x : v) x += noise * gaussian(rng);
        out.push_back(v);
        ++since_change;
    }
}

std::size_t samples_for(double seconds) { return static_cast<std::size_t>(std::llround(seconds * kTargetRateHz)); }

}  // namespace

void SynthConfig::validate() const {
    if (subjects < 1 || classes < 2 || classes > 24) throw Error(ErrorKind::ParameterOutOfRange, "synth needs >= 1 subject and 2..24 classes");
    if (!(minutes_per_subject > 0) || !(bout_min_s >= 10) || !(bout_max_s >= bout_min_s) || !(gap_min_s >= 0) ||
        !(gap_max_s >= gap_min_s)) {
        throw Error(ErrorKind::ParameterOutOfRange, "synth durations out of range");
    }
}

std::string synth_class_name(int k) {
    std::string name = "class_";
    name += static_cast<char>('a' + k);
    return name;
}

std::string synth_subject_id(int s) {
    std::string id = std::to_string(s + 1);
    return "s" + std::string(id.size() < 2 ? 2 - id.size() : 0, '0') + id;
}

std::vector<LabeledRecording> synth_corpus(const SynthConfig& config) {
    config.validate();
    std::vector<LabeledRecording> out;
    for (int s = 0; s < config.subjects; ++s) {
        Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(s)));
        LabeledRecording rec;
        rec.recording.subject_id = synth_subject_id(s);
        rec.recording.device_id = "wrist";
        rec.recording.sample_rate_hz = kTargetRateHz;
        rec.recording.start_time_ms = 0;
        const std::size_t total = samples_for(config.minutes_per_subject * 60.0);
        auto& samples = rec.recording.samples;
        // Start each subject on a different class so short corpora still see all of them.
        int cls = s % config.classes;
        while (samples.size() < total) {
            const std::size_t gap = samples_for(uniform(rng, config.gap_min_s, config.gap_max_s));
            if (gap > 0) {
                const auto begin = samples.size();
                append_bout(samples, rng, gap, std::nullopt);
                rec.intervals.push_back({"null", static_cast<std::int64_t>(begin * 100 / 3),
                                         static_cast<std::int64_t>(samples.size() * 100 / 3)});
            }
            const std::size_t bout = samples_for(uniform(rng, config.bout_min_s, config.bout_max_s));
            const auto begin = samples.size();
            append_bout(samples, rng, bout, class_hz(cls));
            rec.intervals.push_back({synth_class_name(cls), static_cast<std::int64_t>(begin * 100 / 3),
                                     static_cast<std::int64_t>(samples.size() * 100 / 3)});
            cls = (cls + 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config.classes - 1)))) % config.classes;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

void PlantedConfig::validate() const {
    if (segments < 1 || min_windows < kMinSegmentWindows || max_windows < min_windows || gap_min_windows < 1 ||
        gap_max_windows < gap_min_windows || dim < 2 || !(noise_sigma >= 0)) {
        throw Error(ErrorKind::ParameterOutOfRange, "planted stream parameters out of range");
    }
}

PlantedStream planted_segment_stream(const PlantedConfig& config) {
    config.validate();
    Rng rng(mix_seed(config.seed, 0x91A7));
    PlantedStream out;
    std::int64_t cursor = 0;
    auto random_vector = [&] {
        std::vector<double> v(static_cast<std::size_t>(config.dim));
        double norm = 0.0;
        for (double& x : v) {
            x = gaussian(rng);
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        return v;
    };
    auto push = [&](const std::vector<double>& v) {
        EmbeddingRecord r;
        r.subject_id = config.subject_id;
        r.start_time_ms = cursor;
        r.vector.assign(v.begin(), v.end());
        out.series.push_back(std::move(r));
        cursor += kWindowMs;
    };
    auto gap = [&] {
        const auto n = config.gap_min_windows + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config.gap_max_windows - config.gap_min_windows + 1)));
        const auto begin = cursor;
        for (int i = 0; i < n; ++i) push(random_vector());
        out.truth.push_back({config.subject_id, {"null", begin, cursor}});
    };
    gap();
    for (int k = 0; k < config.segments; ++k) {
        const auto centre = random_vector();
        const auto n = config.min_windows + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(config.max_windows - config.min_windows + 1)));
        const auto begin = cursor;
        for (int i = 0; i < n; ++i) {
            auto v = centre;
            for (double& x : v) x += gaussian(rng, 0.0, config.noise_sigma);
            push(v);
        }
        out.truth.push_back({config.subject_id, {"run" + std::to_string(k), begin, cursor}});
        gap();
    }
    return out;
}

}  // namespace cadence
