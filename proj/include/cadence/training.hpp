#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cadence/augment.hpp"
#include "cadence/checkpoint.hpp"
#include "cadence/network.hpp"
#include "cadence/pairing.hpp"

namespace cadence {

struct TrainConfig {
    // Target step count. A resumed run continues from the checkpoint's step up
    // to this value.
    std::int64_t steps = 2000;
    std::uint64_t seed = 0;
    std::int64_t checkpoint_interval = 0;   // 0: final checkpoint only
    bool prefetch = true;                   // prepare batch k+1 while step k runs
    Architecture arch;
    PairingConfig pairing;
    AugmentationRanges ranges;
    AdamConfig adam;

    void validate() const;
};

struct TrainHooks {
    std::function<void(std::int64_t step, double loss)> on_step;
    std::function<void(const Checkpoint&)> on_checkpoint;
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<double> losses;   // one per executed step
};

// Batch for step s is drawn from mix_seed(seed, s), so a resumed run matches an
// uninterrupted one step for step.
// Weights a fresh run starts from.
Network<float> initial_network(const TrainConfig& config);

PairBatch sample_pair_batch(const WindowIndex& index, const TrainConfig& config, std::int64_t step);

TrainResult train(const TrainConfig& config, const WindowIndex& index, const std::optional<Checkpoint>& resume = std::nullopt,
                  const TrainHooks& hooks = {});

}  // namespace cadence
