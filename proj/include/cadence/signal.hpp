#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cadence {

inline constexpr double kStandardGravity = 9.80665;   // m/s^2 per g
inline constexpr double kTargetRateHz = 30.0;
inline constexpr int kWindowSamples = 300;            // 10 s at 30 Hz
inline constexpr int kAxes = 3;
inline constexpr std::int64_t kWindowMs = 10'000;

using Vec3 = std::array<double, 3>;

struct Recording {
    std::string subject_id;
    std::string device_id;
    double sample_rate_hz = kTargetRateHz;
    std::int64_t start_time_ms = 0;
    std::vector<Vec3> samples;   // native units
    double unit_scale = 1.0;     // native -> g

    // Time of sample i, in ms (fractional).
    double time_of(std::size_t i) const { return start_time_ms + 1000.0 * i / sample_rate_hz; }
    // End of the covered span: one sample period past the last sample.
    double end_time_ms() const { return time_of(samples.size()); }
};

// Row-major 300x3 block: element (t, axis) lives at t * 3 + axis.
using WindowData = std::array<double, kWindowSamples * kAxes>;

struct Window {
    std::string subject_id;
    std::int64_t start_time_ms = 0;
    WindowData data{};
    std::optional<std::string> label;

    double at(int t, int axis) const { return data[static_cast<std::size_t>(t * kAxes + axis)]; }
    double& at(int t, int axis) { return data[static_cast<std::size_t>(t * kAxes + axis)]; }
};

struct LabeledInterval {
    std::string activity;   // "null" for unlabeled transitions
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
};

// Order: mean_x, mean_y, mean_z, mean_norm, std_x, std_y, std_z, std_norm.
struct BaselineFeatures {
    double mean_x = 0, mean_y = 0, mean_z = 0, mean_norm = 0;
    double std_x = 0, std_y = 0, std_z = 0, std_norm = 0;

    std::array<double, 8> to_array() const {
        return {mean_x, mean_y, mean_z, mean_norm, std_x, std_y, std_z, std_norm};
    }
};

struct ResampleOptions {
    // Windowed-sinc low-pass at 15 Hz applied before decimation when the
    // native rate exceeds 30 Hz. Off by default.
    bool antialias = false;
};

// Converts to g and linearly interpolates onto a 30 Hz grid anchored at the
// first sample. Output unit_scale is 1.
Recording normalize_and_resample(const Recording& rec, const ResampleOptions& options = {});

// Consecutive disjoint 300-sample windows; trailing remainder dropped.
// Requires a 30 Hz recording already in g.
std::vector<Window> split_windows(const Recording& rec);

constexpr std::int64_t window_count(std::int64_t sample_count) noexcept {
    return sample_count < 0 ? 0 : sample_count / kWindowSamples;
}

// Windows at 30 Hz for a duration given in hours; index arithmetic only.
constexpr std::int64_t window_count_for_hours(std::int64_t hours) noexcept {
    return window_count(hours * 3600 * static_cast<std::int64_t>(kTargetRateHz));
}

BaselineFeatures baseline_features(const Window& w);

// Assigns each window the activity of an interval that fully contains it;
// windows straddling a boundary keep no label.
void assign_labels(std::span<Window> windows, std::span<const LabeledInterval> intervals);

}  // namespace cadence
