#include "cadence/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cadence/error.hpp"

namespace cadence {

namespace {

void require_finite(const Recording& rec) {
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        for (double v : rec.samples[i]) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::NonFiniteSample,
                            rec.subject_id + ": sample " + std::to_string(i) + " is not finite");
            }
        }
    }
}

// Hamming-windowed sinc, normalized to unit DC gain.
std::vector<double> lowpass_taps(double cutoff_hz, double rate_hz) {
    const int half = static_cast<int>(std::ceil(2.0 * rate_hz / cutoff_hz));
    const double fc = cutoff_hz / rate_hz;
    std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double sinc = k == 0 ? 2.0 * fc
                                   : std::sin(2.0 * std::numbers::pi * fc * k) / (std::numbers::pi * k);
        const double hamming = 0.54 + 0.46 * std::cos(std::numbers::pi * k / half);
        taps[static_cast<std::size_t>(k + half)] = sinc * hamming;
        sum += sinc * hamming;
    }
    for (double& t : taps) t /= sum;
    return taps;
}

std::vector<Vec3> lowpass(const std::vector<Vec3>& in, double rate_hz) {
    const auto taps = lowpass_taps(kTargetRateHz / 2.0, rate_hz);
    const int half = static_cast<int>(taps.size() / 2);
    const int n = static_cast<int>(in.size());
    std::vector<Vec3> out(in.size());
    for (int i = 0; i < n; ++i) {
        Vec3 acc{0.0, 0.0, 0.0};
        for (int k = -half; k <= half; ++k) {
            const int j = std::clamp(i + k, 0, n - 1);
            const double w = taps[static_cast<std::size_t>(k + half)];
            for (int a = 0; a < kAxes; ++a) acc[a] += w * in[static_cast<std::size_t>(j)][a];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

struct MeanStd {
    double mean;
    double stddev;
};

// Shifted two-pass: a constant column gives a mean equal to that constant and
// a standard deviation of exactly zero.
template <typename Get>
MeanStd column_stats(Get&& get) {
    const double origin = get(0);
    double sum = 0.0;
    for (int t = 0; t < kWindowSamples; ++t) sum += get(t) - origin;
    const double shifted_mean = sum / kWindowSamples;
    double ss = 0.0;
    for (int t = 0; t < kWindowSamples; ++t) {
        const double d = (get(t) - origin) - shifted_mean;
        ss += d * d;
    }
    return {origin + shifted_mean, std::sqrt(ss / kWindowSamples)};
}

}  // namespace

Recording normalize_and_resample(const Recording& rec, const ResampleOptions& options) {
    if (!(rec.sample_rate_hz > 0.0) || !std::isfinite(rec.sample_rate_hz)) {
        throw Error(ErrorKind::InvalidArgument, "sample rate must be positive");
    }
    if (!(rec.unit_scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "unit scale must be positive");
    if (rec.samples.size() < 2) {
        throw Error(ErrorKind::EmptyRecording, rec.subject_id + ": need at least 2 samples");
    }
    require_finite(rec);

    const std::vector<Vec3> filtered = options.antialias && rec.sample_rate_hz > kTargetRateHz
                                           ? lowpass(rec.samples, rec.sample_rate_hz)
                                           : std::vector<Vec3>{};
    const std::vector<Vec3>& src = filtered.empty() ? rec.samples : filtered;

    const auto n = src.size();
    const double duration_s = static_cast<double>(n - 1) / rec.sample_rate_hz;
    const auto m = static_cast<std::size_t>(std::floor(duration_s * kTargetRateHz + 1e-9)) + 1;

    Recording out;
    out.subject_id = rec.subject_id;
    out.device_id = rec.device_id;
    out.sample_rate_hz = kTargetRateHz;
    out.start_time_ms = rec.start_time_ms;
    out.unit_scale = 1.0;
    out.samples.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double pos = static_cast<double>(k) * rec.sample_rate_hz / kTargetRateHz;
        auto i = static_cast<std::size_t>(std::floor(pos));
        double frac = pos - static_cast<double>(i);
        if (i >= n - 1) {
            i = n - 1;
            frac = 0.0;
        }
        for (int a = 0; a < kAxes; ++a) {
            double v = src[i][a];
            if (frac != 0.0) v += frac * (src[i + 1][a] - src[i][a]);
            out.samples[k][a] = rec.unit_scale == 1.0 ? v : v * rec.unit_scale;
        }
    }
    return out;
}

std::vector<Window> split_windows(const Recording& rec) {
    if (rec.sample_rate_hz != kTargetRateHz || rec.unit_scale != 1.0) {
        throw Error(ErrorKind::InvalidArgument, "split_windows expects a 30 Hz recording in g");
    }
    const auto count = static_cast<std::size_t>(window_count(static_cast<std::int64_t>(rec.samples.size())));
    std::vector<Window> windows(count);
    for (std::size_t w = 0; w < count; ++w) {
        Window& win = windows[w];
        win.subject_id = rec.subject_id;
        win.start_time_ms = rec.start_time_ms + kWindowMs * static_cast<std::int64_t>(w);
        for (int t = 0; t < kWindowSamples; ++t) {
            const Vec3& s = rec.samples[w * kWindowSamples + static_cast<std::size_t>(t)];
            for (int a = 0; a < kAxes; ++a) win.at(t, a) = s[a];
        }
    }
    return windows;
}

BaselineFeatures baseline_features(const Window& w) {
    for (double v : w.data) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteSample, "window contains a non-finite value");
    }
    std::array<double, kWindowSamples> norm{};
    for (int t = 0; t < kWindowSamples; ++t) {
        norm[static_cast<std::size_t>(t)] =
            std::sqrt(w.at(t, 0) * w.at(t, 0) + w.at(t, 1) * w.at(t, 1) + w.at(t, 2) * w.at(t, 2));
    }
    const auto x = column_stats([&](int t) { return w.at(t, 0); });
    const auto y = column_stats([&](int t) { return w.at(t, 1); });
    const auto z = column_stats([&](int t) { return w.at(t, 2); });
    const auto nrm = column_stats([&](int t) { return norm[static_cast<std::size_t>(t)]; });
    return {x.mean, y.mean, z.mean, std::max(0.0, nrm.mean), x.stddev, y.stddev, z.stddev, nrm.stddev};
}

void assign_labels(std::span<Window> windows, std::span<const LabeledInterval> intervals) {
    for (Window& w : windows) {
        w.label.reset();
        const std::int64_t end = w.start_time_ms + kWindowMs;
        for (const auto& iv : intervals) {
            if (iv.start_ms <= w.start_time_ms && end <= iv.end_ms) {
                w.label = iv.activity;
                break;
            }
        }
    }
}

}  // namespace cadence
