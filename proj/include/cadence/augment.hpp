#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cadence/signal.hpp"

namespace cadence {

enum class AugmentationKind { MedianSmooth, TimeTranslate, BaselineJump, BaselineWander, Rotate, GaussianNoise };

inline constexpr std::array<AugmentationKind, 6> kAllAugmentations = {
    AugmentationKind::MedianSmooth,   AugmentationKind::TimeTranslate, AugmentationKind::BaselineJump,
    AugmentationKind::BaselineWander, AugmentationKind::Rotate,        AugmentationKind::GaussianNoise};

std::string to_string(AugmentationKind kind);

enum class RotationMode { Planar, ThreeAxis };

// Only the fields for `kind` are read. Planar rotation turns
// counter-clockwise about z: (1,0,0) -> (0,1,0) at pi/2.
struct AugmentationSpec {
    AugmentationKind kind = AugmentationKind::GaussianNoise;
    int filter_width = 3;                 // median_smooth, odd samples
    int offset = 0;                       // time_translate, samples; out[t] = in[t - offset]
    double jump_amplitude = 0.0;          // baseline_jump, g
    int jump_index = 0;                   // baseline_jump, first affected sample
    int jump_axis = 0;
    double wander_amplitude = 0.0;        // baseline_wander, g
    double wander_period_s = 10.0;
    std::array<double, 3> wander_phase{}; // per axis, rad
    double angle = 0.0;                   // rotate, rad
    RotationMode rotation_mode = RotationMode::Planar;
    std::array<double, 3> rotation_axis{0.0, 0.0, 1.0};   // ThreeAxis only; normalized on use
    double noise_sigma = 0.0;             // gaussian_noise, g
};

// Sampling ranges for random chains; every field is config-overridable.
struct AugmentationRanges {
    std::vector<int> median_widths{3, 5, 7};
    int translate_min = 15;
    int translate_max = 90;
    double jump_min = 0.05;
    double jump_max = 0.5;
    double wander_amp_min = 0.05;
    double wander_amp_max = 0.3;
    double wander_period_min_s = 5.0;
    double wander_period_max_s = 20.0;
    double noise_min = 0.005;
    double noise_max = 0.05;
    RotationMode rotation_mode = RotationMode::Planar;
    int chain_min = 1;
    int chain_max = 3;

    void validate() const;
};

// Throws ParameterOutOfRange when the spec cannot describe a valid transform
// of a 300x3 window (even median width, |offset| >= 300, negative sigma, ...).
void validate(const AugmentationSpec& spec);

// Deterministic given (spec, seed); the seed is only consumed by gaussian_noise.
Window apply_augmentation(const AugmentationSpec& spec, const Window& w, std::uint64_t seed);

// Applies the chain in order, deriving one sub-seed per element.
Window apply_chain(const std::vector<AugmentationSpec>& chain, const Window& w, std::uint64_t seed);

// 1-3 distinct kinds, parameters drawn uniformly from `ranges`.
std::vector<AugmentationSpec> sample_augmentation_chain(std::uint64_t seed, const AugmentationRanges& ranges = {});

// One spec of the given kind drawn from `ranges`.
AugmentationSpec sample_augmentation(AugmentationKind kind, std::uint64_t seed, const AugmentationRanges& ranges = {});

// True when every parameter of `spec` lies within `ranges`.
bool within_ranges(const AugmentationSpec& spec, const AugmentationRanges& ranges);

}  // namespace cadence
