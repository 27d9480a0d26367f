#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cadence/augment.hpp"
#include "cadence/signal.hpp"

namespace cadence {

struct PairingConfig {
    double delta_t_s = 60.0;
    double mode_mix = 0.5;   // probability of a temporal pair
    int batch_b = 128;

    void validate() const;
};

// Unlabeled windows grouped by subject and sorted by start time. Labels are
// stripped on construction so nothing downstream of training can see them.
class WindowIndex {
public:
    WindowIndex() = default;
    explicit WindowIndex(std::vector<Window> windows);

    std::size_t size() const { return windows_.size(); }
    bool empty() const { return windows_.empty(); }
    const Window& at(std::size_t i) const { return windows_[i]; }

    // Indices of windows sharing `i`'s subject whose start differs by at most
    // `max_ms`, excluding `i` itself.
    std::vector<std::size_t> neighbors(std::size_t i, std::int64_t max_ms) const;

private:
    std::vector<Window> windows_;   // sorted by (subject, start)
    std::vector<std::size_t> group_begin_;   // per window: first index of its subject run
    std::vector<std::size_t> group_end_;
};

enum class PairMode { Temporal, Augmentation };

struct CoincidentPair {
    Window first;
    Window second;
    PairMode mode = PairMode::Augmentation;
};

// Temporal mode falls back to augmentation when the anchor has no
// same-subject neighbour within delta_t.
CoincidentPair sample_coincident_pair(const WindowIndex& index, const PairingConfig& cfg, std::uint64_t seed,
                                      const AugmentationRanges& ranges = {});

// Positions (2i, 2i+1) hold pair i. Matrices are (2b)x(2b), row-major.
struct PairBatch {
    int b = 0;
    std::vector<Window> windows;
    std::vector<std::uint8_t> labels;
    std::vector<double> weights;

    int size() const { return 2 * b; }
    std::uint8_t label(int p, int q) const { return labels[static_cast<std::size_t>(p * size() + q)]; }
    double weight(int p, int q) const { return weights[static_cast<std::size_t>(p * size() + q)]; }
};

PairBatch build_pair_batch(std::vector<CoincidentPair> pairs, int b);

// Label/weight matrices alone, for callers that already hold the windows.
void fill_pair_matrices(PairBatch& batch);

struct PairCategoryCounts {
    std::int64_t identity = 0;
    std::int64_t positive = 0;
    std::int64_t negative = 0;
};

PairCategoryCounts count_pair_categories(const PairBatch& batch);

}  // namespace cadence
