#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cadence/pairing.hpp"
#include "cadence/signal.hpp"

namespace cadence {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Convolutional tower: each block is a 1-D convolution (kernel, stride,
// "same" padding) followed by ReLU; global average pooling over time, then a
// dense layer to the embedding. Projector: [e_p; e_q] -> hidden ReLU -> 2 logits.
struct Architecture {
    int input_length = kWindowSamples;
    int input_channels = kAxes;
    std::vector<int> widths{16, 32, 64, 128, 256};
    int kernel = 5;
    int stride = 2;
    int embed_dim = 256;
    int projector_hidden = 128;

    void validate() const;
    // Temporal length entering each block plus the final pooled length:
    // 300 -> 150 -> 75 -> 38 -> 19 -> 10 for the default tower.
    std::vector<int> lengths() const;
    // Canonical one-line description, stored in checkpoints.
    std::string describe() const;

    bool operator==(const Architecture&) const = default;
};

struct ParamSlot {
    std::string name;
    std::vector<int> shape;
    std::size_t offset = 0;
    std::size_t size = 0;
};

// Flat parameter vector layout: conv{i}.weight [out,in,k], conv{i}.bias,
// dense.weight [d,C], dense.bias, proj.hidden.weight [H,2d], proj.hidden.bias,
// proj.out.weight [2,H], proj.out.bias. All row-major.
struct ParamLayout {
    std::vector<ParamSlot> slots;
    std::size_t total = 0;

    static ParamLayout for_architecture(const Architecture& arch);
    const ParamSlot& find(const std::string& name) const;
};

template <typename T>
struct Network {
    Architecture arch;
    ParamLayout layout;
    std::vector<T> params;

    static Network zeros(const Architecture& arch);
    // He-normal for ReLU layers, LeCun-normal for the linear outputs, zero biases.
    static Network initialized(const Architecture& arch, std::uint64_t seed);

    std::span<T> slot(const std::string& name);
    std::span<const T> slot(const std::string& name) const;

    template <typename U>
    Network<U> cast() const {
        Network<U> out;
        out.arch = arch;
        out.layout = layout;
        out.params.assign(params.begin(), params.end());
        return out;
    }
};

// Channel-major input [C, N * L]; column n * L + t holds time step t of example n.
template <typename T>
Matrix<T> windows_to_input(std::span<const Window> windows);

// Returns N x embed_dim embeddings.
template <typename T>
Matrix<T> encoder_forward(const Network<T>& net, std::span<const Window> windows);
template <typename T>
Matrix<T> encoder_forward(const Network<T>& net, const Matrix<T>& input);

// paired: M x 2d concatenated embeddings -> M x 2 logits.
template <typename T>
Matrix<T> projector_forward(const Network<T>& net, const Matrix<T>& paired);

// Pair features for every ordered (p, q), row p * N + q: [e_p ; e_q].
template <typename T>
Matrix<T> pair_features(const Matrix<T>& embeddings);

// sum w * CE(softmax(logits), label) / sum w. logits: M x 2.
template <typename T>
T contrastive_loss(const Matrix<T>& logits, std::span<const std::uint8_t> labels, std::span<const double> weights);

template <typename T>
struct GradientResult {
    T loss{};
    std::vector<T> grads;   // same layout as Network::params
};

// Full forward + backward over a pair batch.
template <typename T>
GradientResult<T> backprop_gradients(const PairBatch& batch, const Network<T>& net);

// Loss only, through the same factored forward used in training.
template <typename T>
T batch_loss(const PairBatch& batch, const Network<T>& net);

using GradientFn = std::function<GradientResult<double>(const PairBatch&, const Network<double>&)>;

// Max over a random parameter subset (`probes_per_slot` entries from every
// slot) of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8), with
// central differences of half-width `epsilon`.
double gradient_check(const Network<double>& net, const PairBatch& batch, double epsilon,
                      std::size_t probes_per_slot = 8, std::uint64_t seed = 0, const GradientFn& analytic = {});

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
    AdamConfig config;
    std::vector<T> m;
    std::vector<T> v;
    std::int64_t step = 0;

    static AdamState fresh(const AdamConfig& config, std::size_t size) {
        return {config, std::vector<T>(size, T(0)), std::vector<T>(size, T(0)), 0};
    }
};

template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads, AdamState<T>& state);

}  // namespace cadence
