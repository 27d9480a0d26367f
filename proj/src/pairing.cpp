#include "cadence/pairing.hpp"

#include <algorithm>
#include <cmath>

#include "cadence/error.hpp"
#include "cadence/random.hpp"

namespace cadence {

void PairingConfig::validate() const {
    if (!(delta_t_s >= 10.0)) throw Error(ErrorKind::Config, "pairing.delta_t_s must be >= 10");
    if (!(mode_mix >= 0.0 && mode_mix <= 1.0)) throw Error(ErrorKind::Config, "pairing.mode_mix must lie in [0, 1]");
    if (batch_b < 1) throw Error(ErrorKind::Config, "pairing.batch_b must be >= 1");
}

WindowIndex::WindowIndex(std::vector<Window> windows) : windows_(std::move(windows)) {
    for (auto& w : windows_) w.label.reset();
    std::stable_sort(windows_.begin(), windows_.end(), [](const Window& a, const Window& b) {
        return a.subject_id != b.subject_id ? a.subject_id < b.subject_id : a.start_time_ms < b.start_time_ms;
    });
    group_begin_.resize(windows_.size());
    group_end_.resize(windows_.size());
    std::size_t begin = 0;
    while (begin < windows_.size()) {
        std::size_t end = begin;
        while (end < windows_.size() && windows_[end].subject_id == windows_[begin].subject_id) ++end;
        for (std::size_t i = begin; i < end; ++i) {
            group_begin_[i] = begin;
            group_end_[i] = end;
        }
        begin = end;
    }
}

std::vector<std::size_t> WindowIndex::neighbors(std::size_t i, std::int64_t max_ms) const {
    const auto first = windows_.begin() + static_cast<std::ptrdiff_t>(group_begin_[i]);
    const auto last = windows_.begin() + static_cast<std::ptrdiff_t>(group_end_[i]);
    const std::int64_t t = windows_[i].start_time_ms;
    const auto lo = std::lower_bound(first, last, t - max_ms,
                                     [](const Window& w, std::int64_t v) { return w.start_time_ms < v; });
    const auto hi = std::upper_bound(first, last, t + max_ms,
                                     [](std::int64_t v, const Window& w) { return v < w.start_time_ms; });
    std::vector<std::size_t> out;
    for (auto it = lo; it != hi; ++it) {
        const auto j = static_cast<std::size_t>(it - windows_.begin());
        if (j != i) out.push_back(j);
    }
    return out;
}

CoincidentPair sample_coincident_pair(const WindowIndex& index, const PairingConfig& cfg, std::uint64_t seed,
                                      const AugmentationRanges& ranges) {
    if (index.empty()) throw Error(ErrorKind::EmptyDataset, "window index is empty");
    Rng rng(seed);
    const std::size_t anchor = uniform_index(rng, index.size());
    const bool temporal = std::bernoulli_distribution(cfg.mode_mix)(rng);
    const std::uint64_t sub_seed = rng();

    CoincidentPair pair;
    pair.first = index.at(anchor);
    if (temporal) {
        const auto max_ms = static_cast<std::int64_t>(std::llround(cfg.delta_t_s * 1000.0));
        const auto candidates = index.neighbors(anchor, max_ms);
        if (!candidates.empty()) {
            pair.second = index.at(candidates[uniform_index(rng, candidates.size())]);
            pair.mode = PairMode::Temporal;
            return pair;
        }
    }
    const auto chain = sample_augmentation_chain(mix_seed(sub_seed, 1), ranges);
    pair.second = apply_chain(chain, pair.first, mix_seed(sub_seed, 2));
    pair.mode = PairMode::Augmentation;
    return pair;
}

void fill_pair_matrices(PairBatch& batch) {
    const int n = batch.size();
    const auto cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    batch.labels.assign(cells, 0);
    batch.weights.assign(cells, 0.0);
    const double negative_weight = n > 2 ? 1.0 / static_cast<double>(n - 2) : 0.0;
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            const auto cell = static_cast<std::size_t>(p * n + q);
            if (p == q) {
                batch.labels[cell] = 1;
                batch.weights[cell] = 0.0;
            } else if (p / 2 == q / 2) {
                batch.labels[cell] = 1;
                batch.weights[cell] = 1.0;
            } else {
                batch.weights[cell] = negative_weight;
            }
        }
    }
}

PairBatch build_pair_batch(std::vector<CoincidentPair> pairs, int b) {
    if (b < 1 || pairs.size() != static_cast<std::size_t>(b)) {
        throw Error(ErrorKind::WrongPairCount,
                    "expected " + std::to_string(b) + " pairs, got " + std::to_string(pairs.size()));
    }
    PairBatch batch;
    batch.b = b;
    batch.windows.reserve(static_cast<std::size_t>(2 * b));
    for (auto& pair : pairs) {
        batch.windows.push_back(std::move(pair.first));
        batch.windows.push_back(std::move(pair.second));
    }
    fill_pair_matrices(batch);
    return batch;
}

PairCategoryCounts count_pair_categories(const PairBatch& batch) {
    PairCategoryCounts c;
    const int n = batch.size();
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            if (p == q) {
                ++c.identity;
            } else if (batch.label(p, q) == 1) {
                ++c.positive;
            } else {
                ++c.negative;
            }
        }
    }
    return c;
}

}  // namespace cadence
