#pragma once

#include <cstdint>
#include <string>

#include "cadence/probe.hpp"
#include "cadence/training.hpp"

namespace cadence {

// Everything a run can be configured with. Files are flat `key = value`
// lines with dotted keys; `#` starts a comment; lists are comma separated.
//
//   train.steps, train.seed, train.checkpoint_interval, train.prefetch
//   pairing.delta_t_s, pairing.mode_mix, pairing.batch_b
//   optim.lr, optim.beta1, optim.beta2, optim.epsilon
//   model.widths, model.kernel, model.stride, model.embed_dim, model.projector_hidden
//   augment.median_widths, augment.translate_min, augment.translate_max,
//   augment.jump_min, augment.jump_max, augment.wander_amp_min,
//   augment.wander_amp_max, augment.wander_period_min_s,
//   augment.wander_period_max_s, augment.noise_min, augment.noise_max,
//   augment.rotation_mode (planar|3axis), augment.chain_min, augment.chain_max
//   probe.n_values, probe.repeats, probe.train_fraction, probe.seed,
//   probe.l2_c, probe.full_split
struct Settings {
    TrainConfig train;
    ProbeConfig probe;
};

// Starts from the defaults and applies each line. Unknown keys, duplicate
// keys and malformed values throw Config.
Settings parse_settings(const std::string& contents, Settings base = {});
void apply_setting(Settings& settings, const std::string& key, const std::string& value);

// Every key with its current value, one per line, in a fixed order.
std::string settings_to_text(const Settings& settings);

// Hash of the options that shape the training trajectory (everything except
// steps, checkpoint interval and prefetching).
std::uint64_t config_hash(const TrainConfig& config);

}  // namespace cadence
