#include "cadence/training.hpp"

#include <cmath>
#include <future>

#include "cadence/config.hpp"
#include "cadence/error.hpp"
#include "cadence/random.hpp"

namespace cadence {

namespace {

constexpr std::uint64_t kInitSalt = 0x1A17'5EEDULL;

}  // namespace

void TrainConfig::validate() const {
    if (steps < 1) throw Error(ErrorKind::Config, "train.steps must be >= 1");
    if (checkpoint_interval < 0 || checkpoint_interval > steps) {
        throw Error(ErrorKind::Config, "train.checkpoint_interval must lie in [0, train.steps]");
    }
    arch.validate();
    if (arch.input_length != kWindowSamples || arch.input_channels != kAxes) {
        throw Error(ErrorKind::Config, "training consumes 300x3 windows");
    }
    pairing.validate();
    ranges.validate();
    if (!(adam.lr >= 0) || !(adam.beta1 >= 0 && adam.beta1 < 1) || !(adam.beta2 >= 0 && adam.beta2 < 1) ||
        !(adam.epsilon > 0)) {
        throw Error(ErrorKind::Config, "optimizer hyperparameters out of range");
    }
}

Network<float> initial_network(const TrainConfig& config) {
    return Network<float>::initialized(config.arch, mix_seed(config.seed, kInitSalt));
}

PairBatch sample_pair_batch(const WindowIndex& index, const TrainConfig& config, std::int64_t step) {
    const std::uint64_t step_seed = mix_seed(config.seed, static_cast<std::uint64_t>(step));
    std::vector<CoincidentPair> pairs;
    pairs.reserve(static_cast<std::size_t>(config.pairing.batch_b));
    for (int i = 0; i < config.pairing.batch_b; ++i) {
        pairs.push_back(sample_coincident_pair(index, config.pairing, mix_seed(step_seed, static_cast<std::uint64_t>(i)),
                                               config.ranges));
    }
    return build_pair_batch(std::move(pairs), config.pairing.batch_b);
}

TrainResult train(const TrainConfig& config, const WindowIndex& index, const std::optional<Checkpoint>& resume,
                  const TrainHooks& hooks) {
    config.validate();
    if (index.empty()) throw Error(ErrorKind::EmptyDataset, "no training windows");

    TrainResult result;
    Checkpoint& ckpt = result.checkpoint;
    if (resume) {
        if (!(resume->network.arch == config.arch)) {
            throw Error(ErrorKind::VersionMismatch, "resume checkpoint architecture differs from config");
        }
        ckpt = *resume;
        ckpt.optimizer.config = config.adam;
    } else {
        ckpt.network = initial_network(config);
        ckpt.optimizer = AdamState<float>::fresh(config.adam, ckpt.network.params.size());
        ckpt.step = 0;
    }
    ckpt.seed = config.seed;
    ckpt.config_hash = config_hash(config);

    const std::int64_t first = ckpt.step + 1;
    if (first > config.steps) return result;
    result.losses.reserve(static_cast<std::size_t>(config.steps - ckpt.step));

    std::future<PairBatch> pending;
    auto launch = [&](std::int64_t step) {
        return std::async(config.prefetch ? std::launch::async : std::launch::deferred,
                          [&index, &config, step] { return sample_pair_batch(index, config, step); });
    };
    pending = launch(first);
    for (std::int64_t step = first; step <= config.steps; ++step) {
        PairBatch batch = pending.get();
        if (step < config.steps) pending = launch(step + 1);

        auto grads = backprop_gradients(batch, ckpt.network);
        const double loss = static_cast<double>(grads.loss);
        if (!std::isfinite(loss)) throw Error(ErrorKind::DivergedLoss, "loss became non-finite at step " + std::to_string(step));
        adam_step(ckpt.network.params, grads.grads, ckpt.optimizer);
        ckpt.step = step;
        result.losses.push_back(loss);
        if (hooks.on_step) hooks.on_step(step, loss);
        if (hooks.on_checkpoint && config.checkpoint_interval > 0 && step % config.checkpoint_interval == 0 &&
            step != config.steps) {
            hooks.on_checkpoint(ckpt);
        }
    }
    if (hooks.on_checkpoint) hooks.on_checkpoint(ckpt);
    return result;
}

}  // namespace cadence
