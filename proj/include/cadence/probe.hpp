#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cadence/network.hpp"
#include "cadence/signal.hpp"

namespace cadence {

struct EmbeddingRecord {
    std::string subject_id;
    std::int64_t start_time_ms = 0;
    std::vector<float> vector;
    std::optional<std::string> label;
};

using EmbeddingSeries = std::vector<EmbeddingRecord>;

// One embedding per window, in input order, labels copied through. Windows
// are encoded in chunks of `chunk` examples.
EmbeddingSeries embed_windows(const Network<float>& encoder, std::span<const Window> windows, std::size_t chunk = 64);

struct ProbeConfig {
    std::vector<int> n_values{1, 5, 10, 15, 25, 50};
    int repeats = 10;
    double train_fraction = 0.75;
    std::uint64_t seed = 0;
    double l2_c = 1.0;          // inverse regularization strength
    bool full_split = true;     // also fit on the whole training split (reported as n = 0)

    void validate() const;
};

// Labeled feature rows; "null" and unlabeled records are dropped by the
// builders below.
struct FeatureTable {
    std::vector<std::string> labels;
    Eigen::MatrixXd features;   // one row per record
};

FeatureTable features_from_embeddings(const EmbeddingSeries& series);
FeatureTable features_from_baseline(std::span<const Window> windows);

// n draws with replacement for every class in `classes`; returns positions
// into `train_labels`. Throws MissingClass when a class has no candidates.
std::vector<std::size_t> sample_label_subset(std::span<const std::string> train_labels,
                                             std::span<const std::string> classes, int n, std::uint64_t seed);

struct ProbeFitOptions {
    double l2_c = 1.0;
    int max_iterations = 5000;
    double tolerance = 1e-6;   // infinity norm of the scaled gradient
};

// Multinomial logistic regression minimizing
//   C * sum_i CE(softmax(W x_i + b), y_i) + 0.5 * ||W||^2
// by gradient descent with Barzilai-Borwein steps and an Armijo backtracking
// safeguard. The bias is not penalized.
struct LinearProbe {
    Eigen::MatrixXd weights;   // K x D
    Eigen::VectorXd bias;      // K
    int iterations = 0;
    bool converged = false;

    Eigen::VectorXd decision(const Eigen::VectorXd& x) const { return weights * x + bias; }
    int predict(const Eigen::VectorXd& x) const;
};

LinearProbe fit_linear_probe(const Eigen::MatrixXd& features, std::span<const int> labels, int num_classes,
                             const ProbeFitOptions& options = {});

struct AccuracyCell {
    std::string source;
    int n = 0;   // 0: whole training split
    int repeat = 0;
    double accuracy = 0.0;
};

struct AccuracySummary {
    std::string source;
    int n = 0;
    double mean = 0.0;
    double stddev = 0.0;   // population, over repeats
    int repeats = 0;
};

struct AccuracyReport {
    std::vector<AccuracyCell> cells;
    std::vector<AccuracySummary> summary;
    std::map<std::string, std::size_t> class_counts;

    const AccuracySummary* find(const std::string& source, int n) const;
};

// For every n and repeat: a fresh 75:25 split seeded by (seed, n, repeat),
// n-per-class subset from the training side, probe fit, accuracy on the test
// side. Splits depend only on the seed and row count, so two tables built from
// the same windows get identical splits. `standardize` z-scores features with
// statistics of the training split.
AccuracyReport label_efficiency_curve(const FeatureTable& table, const ProbeConfig& config, const std::string& source,
                                      bool standardize, int threads = 1);

AccuracyReport label_efficiency_curve(const EmbeddingSeries& series, const ProbeConfig& config, int threads = 1);

void merge_reports(AccuracyReport& into, const AccuracyReport& from);

std::string report_csv(const AccuracyReport& report);

}  // namespace cadence
