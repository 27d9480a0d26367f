#include "cadence/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cadence/error.hpp"
#include "cadence/random.hpp"

namespace cadence {

namespace {

[[noreturn]] void out_of_range(const std::string& what) { throw Error(ErrorKind::ParameterOutOfRange, what); }

// Mirror without repeating the edge sample.
int reflect(int j) {
    constexpr int n = kWindowSamples;
    while (j < 0 || j >= n) j = j < 0 ? -j : 2 * (n - 1) - j;
    return j;
}

void median_smooth(const Window& in, Window& out, int width) {
    const int half = width / 2;
    std::vector<double> buf(static_cast<std::size_t>(width));
    for (int a = 0; a < kAxes; ++a) {
        for (int t = 0; t < kWindowSamples; ++t) {
            for (int k = -half; k <= half; ++k) buf[static_cast<std::size_t>(k + half)] = in.at(reflect(t + k), a);
            std::nth_element(buf.begin(), buf.begin() + half, buf.end());
            out.at(t, a) = buf[static_cast<std::size_t>(half)];
        }
    }
}

void rotate(Window& w, const AugmentationSpec& s) {
    const double c = std::cos(s.angle);
    const double sn = std::sin(s.angle);
    if (s.rotation_mode == RotationMode::Planar) {
        for (int t = 0; t < kWindowSamples; ++t) {
            const double x = w.at(t, 0);
            const double y = w.at(t, 1);
            w.at(t, 0) = c * x - sn * y;
            w.at(t, 1) = sn * x + c * y;
        }
        return;
    }
    const auto& u = s.rotation_axis;
    const double len = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    const double ux = u[0] / len, uy = u[1] / len, uz = u[2] / len;
    const double k = 1.0 - c;
    const std::array<std::array<double, 3>, 3> r = {{
        {c + ux * ux * k, ux * uy * k - uz * sn, ux * uz * k + uy * sn},
        {uy * ux * k + uz * sn, c + uy * uy * k, uy * uz * k - ux * sn},
        {uz * ux * k - uy * sn, uz * uy * k + ux * sn, c + uz * uz * k},
    }};
    for (int t = 0; t < kWindowSamples; ++t) {
        const std::array<double, 3> v{w.at(t, 0), w.at(t, 1), w.at(t, 2)};
        for (int i = 0; i < 3; ++i) {
            w.at(t, i) = r[static_cast<std::size_t>(i)][0] * v[0] + r[static_cast<std::size_t>(i)][1] * v[1] +
                         r[static_cast<std::size_t>(i)][2] * v[2];
        }
    }
}

std::array<double, 3> random_unit_vector(Rng& rng) {
    while (true) {
        std::array<double, 3> v{gaussian(rng), gaussian(rng), gaussian(rng)};
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (n > 1e-6) return {v[0] / n, v[1] / n, v[2] / n};
    }
}

double signed_magnitude(Rng& rng, double lo, double hi) {
    const double m = uniform(rng, lo, hi);
    return std::bernoulli_distribution(0.5)(rng) ? m : -m;
}

}  // namespace

std::string to_string(AugmentationKind kind) {
    switch (kind) {
        case AugmentationKind::MedianSmooth: return "median_smooth";
        case AugmentationKind::TimeTranslate: return "time_translate";
        case AugmentationKind::BaselineJump: return "baseline_jump";
        case AugmentationKind::BaselineWander: return "baseline_wander";
        case AugmentationKind::Rotate: return "rotate";
        case AugmentationKind::GaussianNoise: return "gaussian_noise";
    }
    return "unknown";
}

void AugmentationRanges::validate() const {
    if (median_widths.empty()) out_of_range("augment.median_widths is empty");
    for (int w : median_widths) {
        if (w < 1 || w % 2 == 0 || w >= kWindowSamples) out_of_range("median width must be odd and < 300");
    }
    if (translate_min < 0 || translate_min > translate_max || translate_max >= kWindowSamples) {
        out_of_range("translate range must satisfy 0 <= min <= max < 300");
    }
    if (!(jump_min >= 0 && jump_min <= jump_max)) out_of_range("jump range");
    if (!(wander_amp_min >= 0 && wander_amp_min <= wander_amp_max)) out_of_range("wander amplitude range");
    if (!(wander_period_min_s > 0 && wander_period_min_s <= wander_period_max_s)) out_of_range("wander period range");
    if (!(noise_min >= 0 && noise_min <= noise_max)) out_of_range("noise range");
    if (chain_min < 1 || chain_min > chain_max || chain_max > static_cast<int>(kAllAugmentations.size())) {
        out_of_range("chain length must satisfy 1 <= min <= max <= 6");
    }
}

void validate(const AugmentationSpec& s) {
    switch (s.kind) {
        case AugmentationKind::MedianSmooth:
            if (s.filter_width < 1 || s.filter_width % 2 == 0 || s.filter_width >= kWindowSamples) {
                out_of_range("median filter width must be odd and < 300");
            }
            break;
        case AugmentationKind::TimeTranslate:
            if (std::abs(s.offset) >= kWindowSamples) out_of_range("translation offset must be < 300 samples");
            break;
        case AugmentationKind::BaselineJump:
            if (!std::isfinite(s.jump_amplitude)) out_of_range("jump amplitude must be finite");
            if (s.jump_index < 0 || s.jump_index >= kWindowSamples) out_of_range("jump index outside window");
            if (s.jump_axis < 0 || s.jump_axis >= kAxes) out_of_range("jump axis");
            break;
        case AugmentationKind::BaselineWander:
            if (!std::isfinite(s.wander_amplitude)) out_of_range("wander amplitude must be finite");
            if (!(s.wander_period_s > 0) || !std::isfinite(s.wander_period_s)) out_of_range("wander period must be positive");
            for (double p : s.wander_phase) {
                if (!std::isfinite(p)) out_of_range("wander phase must be finite");
            }
            break;
        case AugmentationKind::Rotate: {
            if (!std::isfinite(s.angle)) out_of_range("rotation angle must be finite");
            const auto& u = s.rotation_axis;
            if (s.rotation_mode == RotationMode::ThreeAxis && !(u[0] * u[0] + u[1] * u[1] + u[2] * u[2] > 1e-12)) {
                out_of_range("rotation axis must be nonzero");
            }
            break;
        }
        case AugmentationKind::GaussianNoise:
            if (!(s.noise_sigma >= 0) || !std::isfinite(s.noise_sigma)) out_of_range("noise sigma must be >= 0");
            break;
    }
}

Window apply_augmentation(const AugmentationSpec& s, const Window& w, std::uint64_t seed) {
    validate(s);
    Window out = w;
    switch (s.kind) {
        case AugmentationKind::MedianSmooth:
            median_smooth(w, out, s.filter_width);
            break;
        case AugmentationKind::TimeTranslate:
            for (int t = 0; t < kWindowSamples; ++t) {
                for (int a = 0; a < kAxes; ++a) out.at(t, a) = w.at(reflect(t - s.offset), a);
            }
            break;
        case AugmentationKind::BaselineJump:
            for (int t = s.jump_index; t < kWindowSamples; ++t) out.at(t, s.jump_axis) += s.jump_amplitude;
            break;
        case AugmentationKind::BaselineWander: {
            const double omega = 2.0 * std::numbers::pi / (s.wander_period_s * kTargetRateHz);
            for (int t = 0; t < kWindowSamples; ++t) {
                for (int a = 0; a < kAxes; ++a) {
                    out.at(t, a) += s.wander_amplitude * std::sin(omega * t + s.wander_phase[static_cast<std::size_t>(a)]);
                }
            }
            break;
        }
        case AugmentationKind::Rotate:
            rotate(out, s);
            break;
        case AugmentationKind::GaussianNoise:
            if (s.noise_sigma > 0.0) {
                Rng rng(seed);
                std::normal_distribution<double> noise(0.0, s.noise_sigma);
                for (double& v : out.data) v += noise(rng);
            }
            break;
    }
    return out;
}

Window apply_chain(const std::vector<AugmentationSpec>& chain, const Window& w, std::uint64_t seed) {
    Window out = w;
    for (std::size_t i = 0; i < chain.size(); ++i) out = apply_augmentation(chain[i], out, mix_seed(seed, i));
    return out;
}

AugmentationSpec sample_augmentation(AugmentationKind kind, std::uint64_t seed, const AugmentationRanges& r) {
    Rng rng(seed);
    AugmentationSpec s;
    s.kind = kind;
    switch (kind) {
        case AugmentationKind::MedianSmooth:
            s.filter_width = r.median_widths[uniform_index(rng, r.median_widths.size())];
            break;
        case AugmentationKind::TimeTranslate: {
            const int m = std::uniform_int_distribution<int>(r.translate_min, r.translate_max)(rng);
            s.offset = std::bernoulli_distribution(0.5)(rng) ? m : -m;
            break;
        }
        case AugmentationKind::BaselineJump:
            s.jump_amplitude = signed_magnitude(rng, r.jump_min, r.jump_max);
            s.jump_index = std::uniform_int_distribution<int>(0, kWindowSamples - 1)(rng);
            s.jump_axis = std::uniform_int_distribution<int>(0, kAxes - 1)(rng);
            break;
        case AugmentationKind::BaselineWander:
            s.wander_amplitude = uniform(rng, r.wander_amp_min, r.wander_amp_max);
            s.wander_period_s = uniform(rng, r.wander_period_min_s, r.wander_period_max_s);
            for (double& p : s.wander_phase) p = uniform(rng, 0.0, 2.0 * std::numbers::pi);
            break;
        case AugmentationKind::Rotate:
            s.angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
            s.rotation_mode = r.rotation_mode;
            if (r.rotation_mode == RotationMode::ThreeAxis) s.rotation_axis = random_unit_vector(rng);
            break;
        case AugmentationKind::GaussianNoise:
            s.noise_sigma = uniform(rng, r.noise_min, r.noise_max);
            break;
    }
    return s;
}

std::vector<AugmentationSpec> sample_augmentation_chain(std::uint64_t seed, const AugmentationRanges& r) {
    r.validate();
    Rng rng(seed);
    const int length = std::uniform_int_distribution<int>(r.chain_min, r.chain_max)(rng);
    auto kinds = kAllAugmentations;
    std::shuffle(kinds.begin(), kinds.end(), rng);
    std::vector<AugmentationSpec> chain;
    for (int i = 0; i < length; ++i) {
        chain.push_back(sample_augmentation(kinds[static_cast<std::size_t>(i)], mix_seed(seed, static_cast<std::uint64_t>(i) + 1), r));
    }
    return chain;
}

bool within_ranges(const AugmentationSpec& s, const AugmentationRanges& r) {
    const auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
    switch (s.kind) {
        case AugmentationKind::MedianSmooth:
            return std::find(r.median_widths.begin(), r.median_widths.end(), s.filter_width) != r.median_widths.end();
        case AugmentationKind::TimeTranslate:
            return in(std::abs(s.offset), r.translate_min, r.translate_max);
        case AugmentationKind::BaselineJump:
            return in(std::abs(s.jump_amplitude), r.jump_min, r.jump_max) && s.jump_index >= 0 &&
                   s.jump_index < kWindowSamples && s.jump_axis >= 0 && s.jump_axis < kAxes;
        case AugmentationKind::BaselineWander:
            return in(s.wander_amplitude, r.wander_amp_min, r.wander_amp_max) &&
                   in(s.wander_period_s, r.wander_period_min_s, r.wander_period_max_s) &&
                   std::all_of(s.wander_phase.begin(), s.wander_phase.end(),
                               [](double p) { return p >= 0 && p < 2.0 * std::numbers::pi; });
        case AugmentationKind::Rotate:
            return s.angle >= 0 && s.angle < 2.0 * std::numbers::pi && s.rotation_mode == r.rotation_mode;
        case AugmentationKind::GaussianNoise:
            return in(s.noise_sigma, r.noise_min, r.noise_max);
    }
    return false;
}

}  // namespace cadence
