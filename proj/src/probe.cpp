#include "cadence/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "cadence/error.hpp"
#include "cadence/parallel.hpp"
#include "cadence/random.hpp"
#include "cadence/text.hpp"

namespace cadence {

namespace {

bool usable_label(const std::optional<std::string>& label) { return label && !label->empty() && *label != "null"; }

struct Objective {
    double value;
    Eigen::MatrixXd grad_w;
    Eigen::VectorXd grad_b;
};

// (1/N) sum CE + ||W||^2 / (2 C N): same minimizer as the C-weighted form,
// better scaled for a fixed tolerance.
Objective evaluate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& onehot, const Eigen::MatrixXd& w,
                   const Eigen::VectorXd& b, double c) {
    const double n = static_cast<double>(x.rows());
    Eigen::MatrixXd z = x * w.transpose();
    z.rowwise() += b.transpose();
    double ce = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double top = z.row(i).maxCoeff();
        const double lse = top + std::log((z.row(i).array() - top).exp().sum());
        ce += lse - (z.row(i).array() * onehot.row(i).array()).sum();
        z.row(i) = (z.row(i).array() - lse).exp();
    }
    const Eigen::MatrixXd residual = z - onehot;
    Objective o;
    o.value = ce / n + w.squaredNorm() / (2.0 * c * n);
    o.grad_w = residual.transpose() * x / n + w / (c * n);
    o.grad_b = residual.colwise().sum().transpose() / n;
    return o;
}

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

SplitIndices split_rows(std::size_t rows, double train_fraction, std::uint64_t seed) {
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(rows)));
    return {{order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train)},
            {order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end()}};
}

double run_cell(const FeatureTable& table, const std::vector<std::string>& classes, const ProbeConfig& config, int n,
                int repeat, bool standardize) {
    const std::uint64_t cell_seed = mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(n) + 1),
                                             static_cast<std::uint64_t>(repeat));
    const auto split = split_rows(table.labels.size(), config.train_fraction, cell_seed);

    std::vector<std::size_t> chosen;
    if (n == 0) {
        chosen = split.train;
    } else {
        std::vector<std::string> train_labels;
        for (std::size_t i : split.train) train_labels.push_back(table.labels[i]);
        for (std::size_t pos : sample_label_subset(train_labels, classes, n, mix_seed(cell_seed, 7))) {
            chosen.push_back(split.train[pos]);
        }
    }

    const auto d = table.features.cols();
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
    Eigen::RowVectorXd scale = Eigen::RowVectorXd::Ones(d);
    if (standardize && !split.train.empty()) {
        for (std::size_t i : split.train) mean += table.features.row(static_cast<Eigen::Index>(i));
        mean /= static_cast<double>(split.train.size());
        Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
        for (std::size_t i : split.train) {
            var += (table.features.row(static_cast<Eigen::Index>(i)) - mean).array().square().matrix();
        }
        var /= static_cast<double>(split.train.size());
        for (Eigen::Index j = 0; j < d; ++j) scale(j) = var(j) > 0 ? std::sqrt(var(j)) : 1.0;
    }
    auto row = [&](std::size_t i) -> Eigen::RowVectorXd {
        return (table.features.row(static_cast<Eigen::Index>(i)) - mean).cwiseQuotient(scale);
    };
    auto class_of = [&](const std::string& label) {
        return static_cast<int>(std::lower_bound(classes.begin(), classes.end(), label) - classes.begin());
    };

    Eigen::MatrixXd x(static_cast<Eigen::Index>(chosen.size()), d);
    std::vector<int> y(chosen.size());
    for (std::size_t r = 0; r < chosen.size(); ++r) {
        x.row(static_cast<Eigen::Index>(r)) = row(chosen[r]);
        y[r] = class_of(table.labels[chosen[r]]);
    }
    const auto probe = fit_linear_probe(x, y, static_cast<int>(classes.size()), {config.l2_c});
    std::size_t correct = 0;
    for (std::size_t i : split.test) {
        if (probe.predict(row(i).transpose()) == class_of(table.labels[i])) ++correct;
    }
    return split.test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(split.test.size());
}

void summarize(AccuracyReport& report) {
    report.summary.clear();
    std::map<std::pair<std::string, int>, std::vector<double>> groups;
    std::vector<std::pair<std::string, int>> order;
    for (const auto& c : report.cells) {
        auto key = std::make_pair(c.source, c.n);
        if (!groups.contains(key)) order.push_back(key);
        groups[key].push_back(c.accuracy);
    }
    for (const auto& key : order) {
        const auto& v = groups[key];
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double a : v) ss += (a - mean) * (a - mean);
        report.summary.push_back({key.first, key.second, mean, std::sqrt(ss / static_cast<double>(v.size())),
                                  static_cast<int>(v.size())});
    }
}

}  // namespace

EmbeddingSeries embed_windows(const Network<float>& encoder, std::span<const Window> windows, std::size_t chunk) {
    EmbeddingSeries out;
    out.reserve(windows.size());
    chunk = std::max<std::size_t>(chunk, 1);
    for (std::size_t begin = 0; begin < windows.size(); begin += chunk) {
        const auto part = windows.subspan(begin, std::min(chunk, windows.size() - begin));
        const Matrix<float> emb = encoder_forward(encoder, part);
        for (std::size_t i = 0; i < part.size(); ++i) {
            EmbeddingRecord r;
            r.subject_id = part[i].subject_id;
            r.start_time_ms = part[i].start_time_ms;
            r.label = part[i].label;
            r.vector.resize(static_cast<std::size_t>(emb.cols()));
            for (Eigen::Index j = 0; j < emb.cols(); ++j) r.vector[static_cast<std::size_t>(j)] = emb(static_cast<Eigen::Index>(i), j);
            out.push_back(std::move(r));
        }
    }
    return out;
}

void ProbeConfig::validate() const {
    if (n_values.empty()) throw Error(ErrorKind::Config, "probe.n_values is empty");
    for (int n : n_values) {
        if (n < 1) throw Error(ErrorKind::Config, "probe.n_values entries must be >= 1");
    }
    if (repeats < 1) throw Error(ErrorKind::Config, "probe.repeats must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error(ErrorKind::Config, "probe.train_fraction must lie in (0, 1)");
    if (!(l2_c > 0.0)) throw Error(ErrorKind::Config, "probe.l2_c must be positive");
}

FeatureTable features_from_embeddings(const EmbeddingSeries& series) {
    FeatureTable t;
    std::vector<const EmbeddingRecord*> kept;
    for (const auto& r : series) {
        if (usable_label(r.label)) kept.push_back(&r);
    }
    const auto dim = kept.empty() ? 0 : kept.front()->vector.size();
    t.features.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (kept[i]->vector.size() != dim) throw Error(ErrorKind::ShapeMismatch, "embedding dimensions differ");
        t.labels.push_back(*kept[i]->label);
        for (std::size_t j = 0; j < dim; ++j) t.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kept[i]->vector[j];
    }
    return t;
}

FeatureTable features_from_baseline(std::span<const Window> windows) {
    FeatureTable t;
    std::vector<const Window*> kept;
    for (const auto& w : windows) {
        if (usable_label(w.label)) kept.push_back(&w);
    }
    t.features.resize(static_cast<Eigen::Index>(kept.size()), 8);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        t.labels.push_back(*kept[i]->label);
        const auto f = baseline_features(*kept[i]).to_array();
        for (int j = 0; j < 8; ++j) t.features(static_cast<Eigen::Index>(i), j) = f[static_cast<std::size_t>(j)];
    }
    return t;
}

std::vector<std::size_t> sample_label_subset(std::span<const std::string> train_labels, std::span<const std::string> classes,
                                             int n, std::uint64_t seed) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
    Rng rng(seed);
    std::vector<std::size_t> out;
    for (const auto& cls : classes) {
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < train_labels.size(); ++i) {
            if (train_labels[i] == cls) candidates.push_back(i);
        }
        if (candidates.empty()) throw Error(ErrorKind::MissingClass, cls);
        for (int k = 0; k < n; ++k) out.push_back(candidates[uniform_index(rng, candidates.size())]);
    }
    return out;
}

int LinearProbe::predict(const Eigen::VectorXd& x) const {
    Eigen::Index best = 0;
    decision(x).maxCoeff(&best);
    return static_cast<int>(best);
}

LinearProbe fit_linear_probe(const Eigen::MatrixXd& features, std::span<const int> labels, int num_classes,
                             const ProbeFitOptions& options) {
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw Error(ErrorKind::ShapeMismatch, "feature rows and labels differ");
    }
    if (!features.allFinite()) throw Error(ErrorKind::NonFiniteFeature, "probe features must be finite");
    std::set<int> present(labels.begin(), labels.end());
    if (num_classes < 2 || present.size() < 2) throw Error(ErrorKind::SingleClass, "need at least two classes");
    for (int y : labels) {
        if (y < 0 || y >= num_classes) throw Error(ErrorKind::InvalidArgument, "label outside [0, num_classes)");
    }

    const auto d = features.cols();
    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(features.rows(), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) onehot(static_cast<Eigen::Index>(i), labels[i]) = 1.0;

    LinearProbe probe;
    probe.weights = Eigen::MatrixXd::Zero(num_classes, d);
    probe.bias = Eigen::VectorXd::Zero(num_classes);
    Objective cur = evaluate(features, onehot, probe.weights, probe.bias, options.l2_c);
    double step = 1.0;
    for (int it = 0; it < options.max_iterations; ++it) {
        const double gnorm = std::max(cur.grad_w.cwiseAbs().maxCoeff(), cur.grad_b.cwiseAbs().maxCoeff());
        if (gnorm < options.tolerance) {
            probe.converged = true;
            break;
        }
        const double gsq = cur.grad_w.squaredNorm() + cur.grad_b.squaredNorm();
        Eigen::MatrixXd w_next;
        Eigen::VectorXd b_next;
        Objective next;
        while (true) {
            w_next = probe.weights - step * cur.grad_w;
            b_next = probe.bias - step * cur.grad_b;
            next = evaluate(features, onehot, w_next, b_next, options.l2_c);
            if (next.value <= cur.value - 1e-4 * step * gsq || step < 1e-14) break;
            step *= 0.5;
        }
        const double ss = (w_next - probe.weights).squaredNorm() + (b_next - probe.bias).squaredNorm();
        const double sy = ((w_next - probe.weights).array() * (next.grad_w - cur.grad_w).array()).sum() +
                          (b_next - probe.bias).dot(next.grad_b - cur.grad_b);
        probe.weights = std::move(w_next);
        probe.bias = std::move(b_next);
        cur = std::move(next);
        probe.iterations = it + 1;
        step = sy > 0 ? std::clamp(ss / sy, 1e-10, 1e10) : 1.0;
    }
    return probe;
}

const AccuracySummary* AccuracyReport::find(const std::string& source, int n) const {
    for (const auto& s : summary) {
        if (s.source == source && s.n == n) return &s;
    }
    return nullptr;
}

AccuracyReport label_efficiency_curve(const FeatureTable& table, const ProbeConfig& config, const std::string& source,
                                      bool standardize, int threads) {
    config.validate();
    if (table.labels.size() != static_cast<std::size_t>(table.features.rows())) {
        throw Error(ErrorKind::ShapeMismatch, "feature rows and labels differ");
    }
    AccuracyReport report;
    for (const auto& l : table.labels) ++report.class_counts[l];
    std::vector<std::string> classes;
    for (const auto& [name, count] : report.class_counts) classes.push_back(name);
    if (classes.size() < 2) throw Error(ErrorKind::SingleClass, "need at least two labeled classes");

    std::vector<int> ns = config.n_values;
    if (config.full_split) ns.push_back(0);
    const std::size_t cells = ns.size() * static_cast<std::size_t>(config.repeats);
    report.cells.resize(cells);
    parallel_for(cells, threads, [&](std::size_t i) {
        const int n = ns[i / static_cast<std::size_t>(config.repeats)];
        const int repeat = static_cast<int>(i % static_cast<std::size_t>(config.repeats));
        report.cells[i] = {source, n, repeat, run_cell(table, classes, config, n, repeat, standardize)};
    });
    summarize(report);
    return report;
}

AccuracyReport label_efficiency_curve(const EmbeddingSeries& series, const ProbeConfig& config, int threads) {
    return label_efficiency_curve(features_from_embeddings(series), config, "embedding", false, threads);
}

void merge_reports(AccuracyReport& into, const AccuracyReport& from) {
    into.cells.insert(into.cells.end(), from.cells.begin(), from.cells.end());
    for (const auto& [k, v] : from.class_counts) into.class_counts[k] = v;
    summarize(into);
}

std::string report_csv(const AccuracyReport& report) {
    std::ostringstream out;
    out << "source,n,repeat,accuracy\n";
    for (const auto& c : report.cells) {
        out << c.source << "," << (c.n == 0 ? std::string("full") : std::to_string(c.n)) << "," << c.repeat << ","
            << text::format_double(c.accuracy, 10) << "\n";
    }
    return out.str();
}

}  // namespace cadence
