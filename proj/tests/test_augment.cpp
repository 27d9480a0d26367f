#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "cadence/augment.hpp"
#include "cadence/error.hpp"
#include "helpers.hpp"

using namespace cadence;

namespace {

AugmentationSpec spec_of(AugmentationKind kind) {
    AugmentationSpec s;
    s.kind = kind;
    return s;
}

}  // namespace

TEST_CASE("zero noise is the identity") {
    const auto w = testing::random_window(1);
    auto s = spec_of(AugmentationKind::GaussianNoise);
    s.noise_sigma = 0.0;
    CHECK(apply_augmentation(s, w, 99).data == w.data);
}

TEST_CASE("noise is reproducible from the seed and has the requested spread") {
    const auto w = testing::constant_window(0, 0, 0);
    auto s = spec_of(AugmentationKind::GaussianNoise);
    s.noise_sigma = 0.05;
    const auto a = apply_augmentation(s, w, 7);
    CHECK(apply_augmentation(s, w, 7).data == a.data);
    CHECK(apply_augmentation(s, w, 8).data != a.data);
    double ss = 0;
    for (double v : a.data) ss += v * v;
    CHECK(std::sqrt(ss / static_cast<double>(a.data.size())) == doctest::Approx(0.05).epsilon(0.1));
}

TEST_CASE("planar quarter turn is counter-clockwise about z") {
    auto s = spec_of(AugmentationKind::Rotate);
    s.angle = std::numbers::pi / 2;
    const auto out = apply_augmentation(s, testing::constant_window(1, 0, 0), 0);
    CHECK(out.at(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(out.at(0, 1) == doctest::Approx(1.0));
    CHECK(out.at(0, 2) == 0.0);
}

TEST_CASE("three-axis rotation preserves norms and follows the axis") {
    auto s = spec_of(AugmentationKind::Rotate);
    s.rotation_mode = RotationMode::ThreeAxis;
    s.rotation_axis = {1.0, 0.0, 0.0};
    s.angle = std::numbers::pi / 2;
    // About x, y goes to z.
    const auto q = apply_augmentation(s, testing::constant_window(0, 1, 0), 0);
    CHECK(q.at(5, 2) == doctest::Approx(1.0));
    CHECK(std::abs(q.at(5, 1)) < 1e-15);

    s.rotation_axis = {0.3, -1.2, 0.7};
    s.angle = 1.1;
    const auto w = testing::random_window(4);
    const auto r = apply_augmentation(s, w, 0);
    for (int t = 0; t < kWindowSamples; t += 17) {
        const double n0 = std::hypot(w.at(t, 0), w.at(t, 1), w.at(t, 2));
        const double n1 = std::hypot(r.at(t, 0), r.at(t, 1), r.at(t, 2));
        CHECK(n1 == doctest::Approx(n0).epsilon(1e-12));
    }
}

TEST_CASE("median smoothing") {
    auto s = spec_of(AugmentationKind::MedianSmooth);
    s.filter_width = 5;
    const auto c = testing::constant_window(0.3, -0.2, 1.0);
    CHECK(apply_augmentation(s, c, 0).data == c.data);

    // A single spike disappears; a step edge stays put.
    auto w = testing::constant_window(0, 0, 0);
    w.at(100, 0) = 5.0;
    for (int t = 200; t < kWindowSamples; ++t) w.at(t, 1) = 1.0;
    const auto out = apply_augmentation(s, w, 0);
    CHECK(out.at(100, 0) == 0.0);
    CHECK(out.at(199, 1) == 0.0);
    CHECK(out.at(200, 1) == 1.0);

    // Brute-force median with mirrored edges.
    const auto r = testing::random_window(9);
    const auto m = apply_augmentation(s, r, 0);
    for (int t : {0, 1, 2, 150, 297, 299}) {
        std::vector<double> v;
        for (int k = -2; k <= 2; ++k) {
            int j = t + k;
            if (j < 0) j = -j;
            if (j > 299) j = 598 - j;
            v.push_back(r.at(j, 2));
        }
        std::sort(v.begin(), v.end());
        CHECK(m.at(t, 2) == v[2]);
    }
}

TEST_CASE("time translation shifts with mirrored fill") {
    auto s = spec_of(AugmentationKind::TimeTranslate);
    s.offset = 15;
    const auto w = testing::random_window(3);
    const auto out = apply_augmentation(s, w, 0);
    CHECK(out.at(15, 0) == w.at(0, 0));
    CHECK(out.at(299, 1) == w.at(284, 1));
    CHECK(out.at(0, 2) == w.at(15, 2));
    s.offset = -20;
    const auto back = apply_augmentation(s, w, 0);
    CHECK(back.at(0, 0) == w.at(20, 0));
    CHECK(back.at(299, 0) == w.at(279, 0));
}

TEST_CASE("baseline jump and wander") {
    auto j = spec_of(AugmentationKind::BaselineJump);
    j.jump_amplitude = 0.25;
    j.jump_index = 120;
    j.jump_axis = 1;
    const auto w = testing::random_window(5);
    const auto out = apply_augmentation(j, w, 0);
    CHECK(out.at(119, 1) == w.at(119, 1));
    CHECK(out.at(120, 1) == doctest::Approx(w.at(120, 1) + 0.25));
    CHECK(out.at(200, 0) == w.at(200, 0));

    auto d = spec_of(AugmentationKind::BaselineWander);
    d.wander_amplitude = 0.1;
    d.wander_period_s = 10.0;
    d.wander_phase = {0.0, std::numbers::pi / 2, 0.0};
    const auto z = apply_augmentation(d, testing::constant_window(0, 0, 0), 0);
    CHECK(z.at(75, 0) == doctest::Approx(0.1));   // quarter of a 300-sample period
    CHECK(z.at(0, 1) == doctest::Approx(0.1));
}

TEST_CASE("invalid specs are rejected") {
    auto m = spec_of(AugmentationKind::MedianSmooth);
    m.filter_width = 4;
    CHECK_THROWS_AS(apply_augmentation(m, testing::random_window(0), 0), Error);
    auto t = spec_of(AugmentationKind::TimeTranslate);
    t.offset = 300;
    CHECK_THROWS_AS(validate(t), Error);
    auto n = spec_of(AugmentationKind::GaussianNoise);
    n.noise_sigma = -1;
    try {
        validate(n);
        FAIL("expected ParameterOutOfRange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParameterOutOfRange);
    }
}

TEST_CASE("chain sampling") {
    const AugmentationRanges r;
    const auto a = sample_augmentation_chain(42, r);
    const auto b = sample_augmentation_chain(42, r);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].kind == b[i].kind);
        CHECK(apply_chain(a, testing::random_window(1), 5).data == apply_chain(b, testing::random_window(1), 5).data);
    }

    std::map<AugmentationKind, int> seen;
    std::map<std::size_t, int> lengths;
    for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
        const auto chain = sample_augmentation_chain(seed, r);
        ++lengths[chain.size()];
        std::set<AugmentationKind> kinds;
        for (const auto& s : chain) {
            ++seen[s.kind];
            kinds.insert(s.kind);
            CHECK(within_ranges(s, r));
        }
        CHECK(kinds.size() == chain.size());
    }
    CHECK(seen.size() == kAllAugmentations.size());
    CHECK(lengths.size() == 3);
    CHECK(lengths.begin()->first == 1);
    CHECK(lengths.rbegin()->first == 3);
}

TEST_CASE("sampled parameters respect custom ranges") {
    AugmentationRanges r;
    r.median_widths = {7};
    r.translate_min = 30;
    r.translate_max = 31;
    r.noise_min = 0.2;
    r.noise_max = 0.2;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        for (auto kind : kAllAugmentations) {
            const auto s = sample_augmentation(kind, seed, r);
            CHECK(within_ranges(s, r));
            if (kind == AugmentationKind::MedianSmooth) CHECK(s.filter_width == 7);
            if (kind == AugmentationKind::TimeTranslate) CHECK((std::abs(s.offset) == 30 || std::abs(s.offset) == 31));
            if (kind == AugmentationKind::GaussianNoise) CHECK(s.noise_sigma == 0.2);
        }
    }
    r.translate_max = 400;
    CHECK_THROWS_AS(r.validate(), Error);
}
