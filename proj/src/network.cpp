#include "cadence/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cadence/error.hpp"
#include "cadence/random.hpp"

namespace cadence {

namespace {

template <typename T>
using RowMajor = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ConstWeights = Eigen::Map<const RowMajor<T>>;
template <typename T>
using MutWeights = Eigen::Map<RowMajor<T>>;
template <typename T>
using ConstBias = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;
template <typename T>
using MutBias = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;

std::string conv_name(std::size_t i, const char* part) { return "conv" + std::to_string(i) + "." + part; }

struct BlockGeometry {
    int in_channels;
    int out_channels;
    int in_length;
    int out_length;
    int pad_left;
};

std::vector<BlockGeometry> geometry(const Architecture& arch) {
    const auto lengths = arch.lengths();
    std::vector<BlockGeometry> out;
    int channels = arch.input_channels;
    for (std::size_t i = 0; i < arch.widths.size(); ++i) {
        const int lin = lengths[i];
        const int lout = lengths[i + 1];
        const int pad = std::max((lout - 1) * arch.stride + arch.kernel - lin, 0);
        out.push_back({channels, arch.widths[i], lin, lout, pad / 2});
        channels = arch.widths[i];
    }
    return out;
}

template <typename T>
void im2col(const Matrix<T>& a, const BlockGeometry& g, int n, int k, int s, Matrix<T>& x) {
    x.resize(static_cast<Eigen::Index>(g.in_channels) * k, static_cast<Eigen::Index>(n) * g.out_length);
    for (int ex = 0; ex < n; ++ex) {
        for (int t = 0; t < g.out_length; ++t) {
            T* dst = x.col(static_cast<Eigen::Index>(ex) * g.out_length + t).data();
            for (int j = 0; j < k; ++j) {
                const int src_t = t * s + j - g.pad_left;
                if (src_t < 0 || src_t >= g.in_length) {
                    for (int i = 0; i < g.in_channels; ++i) dst[i * k + j] = T(0);
                } else {
                    const T* src = a.col(static_cast<Eigen::Index>(ex) * g.in_length + src_t).data();
                    for (int i = 0; i < g.in_channels; ++i) dst[i * k + j] = src[i];
                }
            }
        }
    }
}

template <typename T>
void col2im(const Matrix<T>& dx, const BlockGeometry& g, int n, int k, int s, Matrix<T>& da) {
    da.setZero(g.in_channels, static_cast<Eigen::Index>(n) * g.in_length);
    for (int ex = 0; ex < n; ++ex) {
        for (int t = 0; t < g.out_length; ++t) {
            const T* src = dx.col(static_cast<Eigen::Index>(ex) * g.out_length + t).data();
            for (int j = 0; j < k; ++j) {
                const int dst_t = t * s + j - g.pad_left;
                if (dst_t < 0 || dst_t >= g.in_length) continue;
                T* dst = da.col(static_cast<Eigen::Index>(ex) * g.in_length + dst_t).data();
                for (int i = 0; i < g.in_channels; ++i) dst[i] += src[i * k + j];
            }
        }
    }
}

template <typename T>
struct EncoderTrace {
    int n = 0;
    std::vector<Matrix<T>> cols;   // im2col input of each block
    std::vector<Matrix<T>> acts;   // post-ReLU output of each block
    Matrix<T> pooled;              // [C, N]
    Matrix<T> embeddings;          // [d, N]
};

template <typename T>
EncoderTrace<T> encode(const Network<T>& net, const Matrix<T>& input) {
    const Architecture& arch = net.arch;
    if (input.rows() != arch.input_channels || input.cols() % arch.input_length != 0) {
        throw Error(ErrorKind::ShapeMismatch, "encoder input must be [" + std::to_string(arch.input_channels) +
                                                  ", N*" + std::to_string(arch.input_length) + "]");
    }
    EncoderTrace<T> tr;
    tr.n = static_cast<int>(input.cols() / arch.input_length);
    const auto geo = geometry(arch);
    tr.cols.resize(geo.size());
    tr.acts.resize(geo.size());
    const Matrix<T>* current = &input;
    for (std::size_t i = 0; i < geo.size(); ++i) {
        const auto& g = geo[i];
        im2col(*current, g, tr.n, arch.kernel, arch.stride, tr.cols[i]);
        const auto w = net.slot(conv_name(i, "weight"));
        const auto b = net.slot(conv_name(i, "bias"));
        ConstWeights<T> W(w.data(), g.out_channels, g.in_channels * arch.kernel);
        ConstBias<T> B(b.data(), g.out_channels);
        tr.acts[i].noalias() = W * tr.cols[i];
        tr.acts[i].colwise() += B;
        tr.acts[i] = tr.acts[i].cwiseMax(T(0));
        current = &tr.acts[i];
    }
    const auto& last = geo.back();
    tr.pooled.resize(last.out_channels, tr.n);
    for (int ex = 0; ex < tr.n; ++ex) {
        tr.pooled.col(ex) = current->middleCols(static_cast<Eigen::Index>(ex) * last.out_length, last.out_length)
                                .rowwise()
                                .sum() /
                            T(last.out_length);
    }
    ConstWeights<T> Wd(net.slot("dense.weight").data(), arch.embed_dim, last.out_channels);
    ConstBias<T> Bd(net.slot("dense.bias").data(), arch.embed_dim);
    tr.embeddings.noalias() = Wd * tr.pooled;
    tr.embeddings.colwise() += Bd;
    if (!tr.embeddings.allFinite()) throw Error(ErrorKind::NonFiniteActivation, "encoder produced a non-finite value");
    return tr;
}

template <typename T>
void encoder_backward(const Network<T>& net, const EncoderTrace<T>& tr, const Matrix<T>& d_emb, std::vector<T>& grads) {
    const Architecture& arch = net.arch;
    const auto geo = geometry(arch);
    const auto& last = geo.back();
    auto slot_grad = [&](const std::string& name) {
        const auto& s = net.layout.find(name);
        return grads.data() + s.offset;
    };

    ConstWeights<T> Wd(net.slot("dense.weight").data(), arch.embed_dim, last.out_channels);
    MutWeights<T>(slot_grad("dense.weight"), arch.embed_dim, last.out_channels).noalias() += d_emb * tr.pooled.transpose();
    // Row sums land in owned temporaries so their summation order does not
    // follow the alignment of the gradient buffer.
    const Matrix<T> d_dense_bias = d_emb.rowwise().sum();
    MutBias<T>(slot_grad("dense.bias"), arch.embed_dim) += d_dense_bias;
    const Matrix<T> d_pooled = Wd.transpose() * d_emb;

    Matrix<T> d_act(last.out_channels, static_cast<Eigen::Index>(tr.n) * last.out_length);
    for (int ex = 0; ex < tr.n; ++ex) {
        d_act.middleCols(static_cast<Eigen::Index>(ex) * last.out_length, last.out_length) =
            (d_pooled.col(ex) / T(last.out_length)).replicate(1, last.out_length);
    }

    Matrix<T> d_cols;
    for (std::size_t ii = geo.size(); ii-- > 0;) {
        const auto& g = geo[ii];
        const Matrix<T> d_pre = (tr.acts[ii].array() > T(0)).select(d_act, T(0));
        MutWeights<T>(slot_grad(conv_name(ii, "weight")), g.out_channels, g.in_channels * arch.kernel).noalias() +=
            d_pre * tr.cols[ii].transpose();
        const Matrix<T> d_bias = d_pre.rowwise().sum();
        MutBias<T>(slot_grad(conv_name(ii, "bias")), g.out_channels) += d_bias;
        if (ii == 0) break;
        ConstWeights<T> W(net.slot(conv_name(ii, "weight")).data(), g.out_channels, g.in_channels * arch.kernel);
        d_cols.noalias() = W.transpose() * d_pre;
        col2im(d_cols, g, tr.n, arch.kernel, arch.stride, d_act);
    }
}

// Factored pairwise projector over all ordered pairs of a batch. The hidden
// pre-activation for (p, q) is W_a e_p + W_b e_q + b, so both halves are
// computed once per embedding instead of once per pair.
template <typename T>
T projector_pass(const Network<T>& net, const PairBatch& batch, const Matrix<T>& emb, std::vector<T>* grads,
                 Matrix<T>* d_emb) {
    const Architecture& arch = net.arch;
    const int d = arch.embed_dim;
    const int h = arch.projector_hidden;
    const int m = batch.size();
    if (emb.cols() != m || emb.rows() != d) throw Error(ErrorKind::ShapeMismatch, "embedding batch does not match pair batch");

    double weight_sum = 0.0;
    for (double w : batch.weights) weight_sum += w;
    if (weight_sum <= 0.0) return T(0);

    ConstWeights<T> W1(net.slot("proj.hidden.weight").data(), h, 2 * d);
    ConstBias<T> B1(net.slot("proj.hidden.bias").data(), h);
    ConstWeights<T> W2(net.slot("proj.out.weight").data(), 2, h);
    ConstBias<T> B2(net.slot("proj.out.bias").data(), 2);

    Matrix<T> left = W1.leftCols(d) * emb;
    left.colwise() += B1;
    const Matrix<T> right = W1.rightCols(d) * emb;

    Matrix<T> d_left, d_right, d_w2, pre, hidden, logits, d_logits, d_pre;
    Eigen::Matrix<T, Eigen::Dynamic, 1> d_b2;
    if (grads) {
        d_left.setZero(h, m);
        d_right.setZero(h, m);
        d_w2.setZero(2, h);
        d_b2.setZero(2);
    }
    double loss = 0.0;
    for (int p = 0; p < m; ++p) {
        pre = right.colwise() + left.col(p);
        hidden = pre.cwiseMax(T(0));
        logits.noalias() = W2 * hidden;
        logits.colwise() += B2;
        if (grads) d_logits.setZero(2, m);
        for (int q = 0; q < m; ++q) {
            const double w = batch.weight(p, q);
            if (w == 0.0) continue;
            const T z0 = logits(0, q);
            const T z1 = logits(1, q);
            const T top = std::max(z0, z1);
            const T lse = top + std::log(std::exp(z0 - top) + std::exp(z1 - top));
            const int label = batch.label(p, q);
            loss += w * static_cast<double>(lse - (label ? z1 : z0));
            if (grads) {
                const T scale = static_cast<T>(w / weight_sum);
                const T p1 = std::exp(z1 - lse);
                const T p0 = std::exp(z0 - lse);
                d_logits(0, q) = scale * (p0 - (label ? T(0) : T(1)));
                d_logits(1, q) = scale * (p1 - (label ? T(1) : T(0)));
            }
        }
        if (grads) {
            d_w2.noalias() += d_logits * hidden.transpose();
            d_b2 += d_logits.rowwise().sum();
            d_pre.noalias() = W2.transpose() * d_logits;
            d_pre = (pre.array() > T(0)).select(d_pre, T(0));
            d_left.col(p) += d_pre.rowwise().sum();
            d_right += d_pre;
        }
    }
    if (grads) {
        auto slot_grad = [&](const std::string& name) { return grads->data() + net.layout.find(name).offset; };
        MutWeights<T> gW1(slot_grad("proj.hidden.weight"), h, 2 * d);
        gW1.leftCols(d).noalias() += d_left * emb.transpose();
        gW1.rightCols(d).noalias() += d_right * emb.transpose();
        const Matrix<T> d_b1 = d_left.rowwise().sum();
        MutBias<T>(slot_grad("proj.hidden.bias"), h) += d_b1;
        MutWeights<T>(slot_grad("proj.out.weight"), 2, h) += d_w2;
        MutBias<T>(slot_grad("proj.out.bias"), 2) += d_b2;
        d_emb->noalias() = W1.leftCols(d).transpose() * d_left;
        d_emb->noalias() += W1.rightCols(d).transpose() * d_right;
    }
    return static_cast<T>(loss / weight_sum);
}

template <typename T>
T normal_sample(Rng& rng, double stddev) {
    return static_cast<T>(std::normal_distribution<double>(0.0, stddev)(rng));
}

}  // namespace

void Architecture::validate() const {
    if (input_length < 1 || input_channels < 1) throw Error(ErrorKind::Config, "input shape must be positive");
    if (widths.empty()) throw Error(ErrorKind::Config, "model.widths must list at least one block");
    for (int w : widths) {
        if (w < 1) throw Error(ErrorKind::Config, "model.widths entries must be positive");
    }
    if (kernel < 1 || stride < 1) throw Error(ErrorKind::Config, "kernel and stride must be positive");
    if (embed_dim < 1 || projector_hidden < 1) throw Error(ErrorKind::Config, "embedding and hidden sizes must be positive");
}

std::vector<int> Architecture::lengths() const {
    std::vector<int> out{input_length};
    for (std::size_t i = 0; i < widths.size(); ++i) out.push_back((out.back() + stride - 1) / stride);
    return out;
}

std::string Architecture::describe() const {
    std::ostringstream s;
    s << "in=" << input_channels << "x" << input_length << ";widths=";
    for (std::size_t i = 0; i < widths.size(); ++i) s << (i ? "," : "") << widths[i];
    s << ";kernel=" << kernel << ";stride=" << stride << ";embed=" << embed_dim << ";hidden=" << projector_hidden;
    return s.str();
}

ParamLayout ParamLayout::for_architecture(const Architecture& arch) {
    arch.validate();
    ParamLayout layout;
    auto add = [&](std::string name, std::vector<int> shape) {
        std::size_t size = 1;
        for (int s : shape) size *= static_cast<std::size_t>(s);
        layout.slots.push_back({std::move(name), std::move(shape), layout.total, size});
        layout.total += size;
    };
    int channels = arch.input_channels;
    for (std::size_t i = 0; i < arch.widths.size(); ++i) {
        add(conv_name(i, "weight"), {arch.widths[i], channels, arch.kernel});
        add(conv_name(i, "bias"), {arch.widths[i]});
        channels = arch.widths[i];
    }
    add("dense.weight", {arch.embed_dim, channels});
    add("dense.bias", {arch.embed_dim});
    add("proj.hidden.weight", {arch.projector_hidden, 2 * arch.embed_dim});
    add("proj.hidden.bias", {arch.projector_hidden});
    add("proj.out.weight", {2, arch.projector_hidden});
    add("proj.out.bias", {2});
    return layout;
}

const ParamSlot& ParamLayout::find(const std::string& name) const {
    for (const auto& s : slots) {
        if (s.name == name) return s;
    }
    throw Error(ErrorKind::ShapeMismatch, "no parameter named " + name);
}

template <typename T>
Network<T> Network<T>::zeros(const Architecture& arch) {
    Network<T> net;
    net.arch = arch;
    net.layout = ParamLayout::for_architecture(arch);
    net.params.assign(net.layout.total, T(0));
    return net;
}

template <typename T>
Network<T> Network<T>::initialized(const Architecture& arch, std::uint64_t seed) {
    Network<T> net = zeros(arch);
    Rng rng(seed);
    for (const auto& s : net.layout.slots) {
        if (s.shape.size() < 2) continue;
        std::size_t fan_in = 1;
        for (std::size_t i = 1; i < s.shape.size(); ++i) fan_in *= static_cast<std::size_t>(s.shape[i]);
        const bool relu_follows = s.name.rfind("conv", 0) == 0 || s.name == "proj.hidden.weight";
        const double stddev = std::sqrt((relu_follows ? 2.0 : 1.0) / static_cast<double>(fan_in));
        for (std::size_t i = 0; i < s.size; ++i) net.params[s.offset + i] = normal_sample<T>(rng, stddev);
    }
    return net;
}

template <typename T>
std::span<T> Network<T>::slot(const std::string& name) {
    const auto& s = layout.find(name);
    return {params.data() + s.offset, s.size};
}

template <typename T>
std::span<const T> Network<T>::slot(const std::string& name) const {
    const auto& s = layout.find(name);
    return {params.data() + s.offset, s.size};
}

template <typename T>
Matrix<T> windows_to_input(std::span<const Window> windows) {
    Matrix<T> input(kAxes, static_cast<Eigen::Index>(windows.size()) * kWindowSamples);
    for (std::size_t n = 0; n < windows.size(); ++n) {
        for (int t = 0; t < kWindowSamples; ++t) {
            for (int a = 0; a < kAxes; ++a) {
                input(a, static_cast<Eigen::Index>(n) * kWindowSamples + t) = static_cast<T>(windows[n].at(t, a));
            }
        }
    }
    return input;
}

template <typename T>
Matrix<T> encoder_forward(const Network<T>& net, const Matrix<T>& input) {
    return encode(net, input).embeddings.transpose();
}

template <typename T>
Matrix<T> encoder_forward(const Network<T>& net, std::span<const Window> windows) {
    if (net.arch.input_length != kWindowSamples || net.arch.input_channels != kAxes) {
        throw Error(ErrorKind::ShapeMismatch, "architecture does not accept 300x3 windows");
    }
    return encoder_forward(net, windows_to_input<T>(windows));
}

template <typename T>
Matrix<T> projector_forward(const Network<T>& net, const Matrix<T>& paired) {
    const int d = net.arch.embed_dim;
    const int h = net.arch.projector_hidden;
    if (paired.cols() != 2 * d) throw Error(ErrorKind::ShapeMismatch, "paired features must have 2*embed_dim columns");
    ConstWeights<T> W1(net.slot("proj.hidden.weight").data(), h, 2 * d);
    ConstBias<T> B1(net.slot("proj.hidden.bias").data(), h);
    ConstWeights<T> W2(net.slot("proj.out.weight").data(), 2, h);
    ConstBias<T> B2(net.slot("proj.out.bias").data(), 2);
    Matrix<T> hidden = paired * W1.transpose();
    hidden.rowwise() += B1.transpose();
    hidden = hidden.cwiseMax(T(0));
    Matrix<T> logits = hidden * W2.transpose();
    logits.rowwise() += B2.transpose();
    return logits;
}

template <typename T>
Matrix<T> pair_features(const Matrix<T>& embeddings) {
    const auto n = embeddings.rows();
    const auto d = embeddings.cols();
    Matrix<T> out(n * n, 2 * d);
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = 0; q < n; ++q) {
            out.row(p * n + q).head(d) = embeddings.row(p);
            out.row(p * n + q).tail(d) = embeddings.row(q);
        }
    }
    return out;
}

template <typename T>
T contrastive_loss(const Matrix<T>& logits, std::span<const std::uint8_t> labels, std::span<const double> weights) {
    const auto m = static_cast<std::size_t>(logits.rows());
    if (logits.cols() != 2 || labels.size() != m || weights.size() != m) {
        throw Error(ErrorKind::ShapeMismatch, "logits, labels and weights must agree (M x 2, M, M)");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = weights[i];
        if (w < 0.0) throw Error(ErrorKind::InvalidArgument, "negative weight");
        if (w == 0.0) continue;
        const double z0 = static_cast<double>(logits(static_cast<Eigen::Index>(i), 0));
        const double z1 = static_cast<double>(logits(static_cast<Eigen::Index>(i), 1));
        const double top = std::max(z0, z1);
        const double lse = top + std::log(std::exp(z0 - top) + std::exp(z1 - top));
        num += w * (lse - (labels[i] ? z1 : z0));
        den += w;
    }
    return den > 0.0 ? static_cast<T>(num / den) : T(0);
}

template <typename T>
GradientResult<T> backprop_gradients(const PairBatch& batch, const Network<T>& net) {
    const auto trace = encode(net, windows_to_input<T>(batch.windows));
    GradientResult<T> out;
    out.grads.assign(net.layout.total, T(0));
    Matrix<T> d_emb;
    out.loss = projector_pass(net, batch, trace.embeddings, &out.grads, &d_emb);
    if (d_emb.size() == 0) d_emb.setZero(net.arch.embed_dim, batch.size());
    encoder_backward(net, trace, d_emb, out.grads);
    for (T g : out.grads) {
        if (!std::isfinite(static_cast<double>(g))) throw Error(ErrorKind::NonFiniteGradient, "gradient is not finite");
    }
    return out;
}

template <typename T>
T batch_loss(const PairBatch& batch, const Network<T>& net) {
    const auto trace = encode(net, windows_to_input<T>(batch.windows));
    return projector_pass<T>(net, batch, trace.embeddings, nullptr, nullptr);
}

double gradient_check(const Network<double>& net, const PairBatch& batch, double epsilon, std::size_t probes_per_slot,
                      std::uint64_t seed, const GradientFn& analytic) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error(ErrorKind::InvalidEpsilon, "epsilon must be positive");
    const auto result = analytic ? analytic(batch, net) : backprop_gradients(batch, net);
    Network<double> probe = net;
    Rng rng(seed);
    double worst = 0.0;
    for (const auto& s : net.layout.slots) {
        std::vector<std::size_t> picks(s.size);
        std::iota(picks.begin(), picks.end(), s.offset);
        std::shuffle(picks.begin(), picks.end(), rng);
        picks.resize(std::min(picks.size(), probes_per_slot));
        for (std::size_t i : picks) {
            const double original = probe.params[i];
            probe.params[i] = original + epsilon;
            const double up = batch_loss(batch, probe);
            probe.params[i] = original - epsilon;
            const double down = batch_loss(batch, probe);
            probe.params[i] = original;
            const double numeric = (up - down) / (2.0 * epsilon);
            const double a = result.grads[i];
            const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
            worst = std::max(worst, err);
        }
    }
    return worst;
}

template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads, AdamState<T>& state) {
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw Error(ErrorKind::ShapeMismatch, "parameter, gradient and moment sizes differ");
    }
    const AdamConfig& c = state.config;
    ++state.step;
    const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    const T b1 = static_cast<T>(c.beta1);
    const T b2 = static_cast<T>(c.beta2);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const T g = grads[i];
        state.m[i] = b1 * state.m[i] + (T(1) - b1) * g;
        state.v[i] = b2 * state.v[i] + (T(1) - b2) * g * g;
        const double m_hat = static_cast<double>(state.m[i]) / bias1;
        const double v_hat = static_cast<double>(state.v[i]) / bias2;
        params[i] = static_cast<T>(static_cast<double>(params[i]) - c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon));
    }
}

#define CADENCE_INSTANTIATE(T)                                                                                    \
    template struct Network<T>;                                                                                   \
    template Matrix<T> windows_to_input<T>(std::span<const Window>);                                              \
    template Matrix<T> encoder_forward<T>(const Network<T>&, std::span<const Window>);                            \
    template Matrix<T> encoder_forward<T>(const Network<T>&, const Matrix<T>&);                                   \
    template Matrix<T> projector_forward<T>(const Network<T>&, const Matrix<T>&);                                 \
    template Matrix<T> pair_features<T>(const Matrix<T>&);                                                        \
    template T contrastive_loss<T>(const Matrix<T>&, std::span<const std::uint8_t>, std::span<const double>);     \
    template GradientResult<T> backprop_gradients<T>(const PairBatch&, const Network<T>&);                        \
    template T batch_loss<T>(const PairBatch&, const Network<T>&);                                                \
    template void adam_step<T>(std::vector<T>&, const std::vector<T>&, AdamState<T>&);

CADENCE_INSTANTIATE(float)
CADENCE_INSTANTIATE(double)

#undef CADENCE_INSTANTIATE

}  // namespace cadence
