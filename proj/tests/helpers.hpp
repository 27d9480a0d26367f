#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "cadence/random.hpp"
#include "cadence/signal.hpp"

namespace testing {

inline cadence::Window random_window(std::uint64_t seed, const std::string& subject = "s", std::int64_t start = 0) {
    cadence::Rng rng(seed);
    cadence::Window w;
    w.subject_id = subject;
    w.start_time_ms = start;
    for (auto& v : w.data) v = cadence::gaussian(rng, 0.0, 0.5);
    return w;
}

inline cadence::Window constant_window(double x, double y, double z) {
    cadence::Window w;
    for (int t = 0; t < cadence::kWindowSamples; ++t) {
        w.at(t, 0) = x;
        w.at(t, 1) = y;
        w.at(t, 2) = z;
    }
    return w;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("cadence_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
