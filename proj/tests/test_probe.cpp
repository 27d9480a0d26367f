#include <doctest.h>

#include <cmath>
#include <set>

#include "cadence/error.hpp"
#include "cadence/probe.hpp"
#include "cadence/random.hpp"

using namespace cadence;

namespace {

// Damped Newton on the same regularized objective, with the Hessian built
// explicitly over the stacked (W, b) parameters.
struct NewtonResult {
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
};

NewtonResult newton_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y, int k, double c) {
    const auto n = x.rows();
    const auto d = x.cols();
    const auto p = k * (d + 1);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    auto unpack = [&](const Eigen::VectorXd& t, Eigen::MatrixXd& w, Eigen::VectorXd& b) {
        w.resize(k, d);
        b.resize(k);
        for (int j = 0; j < k; ++j) {
            for (Eigen::Index f = 0; f < d; ++f) w(j, f) = t(j * (d + 1) + f);
            b(j) = t(j * (d + 1) + d);
        }
    };
    auto objective = [&](const Eigen::VectorXd& t) {
        Eigen::MatrixXd w;
        Eigen::VectorXd b;
        unpack(t, w, b);
        double v = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd z = w * x.row(i).transpose() + b;
            const double m = z.maxCoeff();
            v += m + std::log((z.array() - m).exp().sum()) - z(y[static_cast<std::size_t>(i)]);
        }
        return v / static_cast<double>(n) + w.squaredNorm() / (2 * c * static_cast<double>(n));
    };
    for (int it = 0; it < 100; ++it) {
        Eigen::MatrixXd w;
        Eigen::VectorXd b;
        unpack(theta, w, b);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p, p);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd xi(d + 1);
            xi << x.row(i).transpose(), 1.0;
            Eigen::VectorXd z = w * x.row(i).transpose() + b;
            Eigen::VectorXd pr = (z.array() - z.maxCoeff()).exp();
            pr /= pr.sum();
            for (int a = 0; a < k; ++a) {
                const double r = pr(a) - (a == y[static_cast<std::size_t>(i)] ? 1.0 : 0.0);
                g.segment(a * (d + 1), d + 1) += r * xi;
                for (int bcls = 0; bcls < k; ++bcls) {
                    const double hab = pr(a) * ((a == bcls ? 1.0 : 0.0) - pr(bcls));
                    h.block(a * (d + 1), bcls * (d + 1), d + 1, d + 1) += hab * xi * xi.transpose();
                }
            }
        }
        g /= static_cast<double>(n);
        h /= static_cast<double>(n);
        for (int a = 0; a < k; ++a) {
            for (Eigen::Index f = 0; f < d; ++f) {
                const auto idx = a * (d + 1) + f;
                g(idx) += theta(idx) / (c * static_cast<double>(n));
                h(idx, idx) += 1.0 / (c * static_cast<double>(n));
            }
        }
        // The softmax Hessian is singular along the shared-shift direction of
        // the biases; a tiny ridge keeps the solve well posed.
        h += 1e-12 * Eigen::MatrixXd::Identity(p, p);
        const Eigen::VectorXd step = h.ldlt().solve(g);
        double t = 1.0;
        const double f0 = objective(theta);
        while (objective(theta - t * step) > f0 - 1e-4 * t * g.dot(step) && t > 1e-10) t *= 0.5;
        theta -= t * step;
        if (g.cwiseAbs().maxCoeff() < 1e-12) break;
    }
    NewtonResult out;
    unpack(theta, out.w, out.b);
    return out;
}

}  // namespace

TEST_CASE("label subsets draw n per class with replacement") {
    std::vector<std::string> labels;
    for (int i = 0; i < 10; ++i) labels.push_back("a");
    for (int i = 0; i < 30; ++i) labels.push_back("b");
    const std::vector<std::string> classes{"a", "b"};
    const auto one = sample_label_subset(labels, classes, 1, 3);
    CHECK(one.size() == 2);
    CHECK(labels[one[0]] == "a");
    CHECK(labels[one[1]] == "b");
    const auto many = sample_label_subset(labels, classes, 50, 3);
    REQUIRE(many.size() == 100);
    std::set<std::size_t> distinct_a(many.begin(), many.begin() + 50);
    CHECK(distinct_a.size() <= 10);
    for (std::size_t i = 0; i < 50; ++i) CHECK(labels[many[i]] == "a");
    CHECK(sample_label_subset(labels, classes, 5, 3) == sample_label_subset(labels, classes, 5, 3));
    try {
        sample_label_subset(labels, std::vector<std::string>{"a", "c"}, 1, 0);
        FAIL("expected MissingClass");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingClass);
    }
}

TEST_CASE("separable two-class problem is fit exactly") {
    Eigen::MatrixXd x(8, 2);
    std::vector<int> y;
    for (int i = 0; i < 8; ++i) {
        x(i, 0) = i < 4 ? -1.0 - 0.1 * i : 1.0 + 0.1 * i;
        x(i, 1) = (i % 3) * 0.5;
        y.push_back(i < 4 ? 0 : 1);
    }
    const auto probe = fit_linear_probe(x, y, 2);
    CHECK(probe.converged);
    for (int i = 0; i < 8; ++i) CHECK(probe.predict(x.row(i).transpose()) == y[static_cast<std::size_t>(i)]);
}

TEST_CASE("conflicting duplicates still converge") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(6, 3);
    const std::vector<int> y{0, 1, 0, 1, 2, 2};
    const auto probe = fit_linear_probe(x, y, 3);
    CHECK(probe.converged);
    CHECK(probe.weights.allFinite());
}

TEST_CASE("probe agrees with a Newton solver") {
    cadence::Rng rng(21);
    const int k = 3, d = 4, n = 45;
    Eigen::MatrixXd x(n, d);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] = i % k;
        for (int f = 0; f < d; ++f) x(i, f) = gaussian(rng) + (f == y[static_cast<std::size_t>(i)] ? 1.2 : 0.0);
    }
    ProbeFitOptions opts;
    opts.tolerance = 1e-9;
    opts.max_iterations = 20000;
    const auto probe = fit_linear_probe(x, y, k, opts);
    CHECK(probe.converged);
    const auto ref = newton_logistic(x, y, k, 1.0);
    // Weights are unique; biases only up to a common shift.
    CHECK((probe.weights - ref.w).cwiseAbs().maxCoeff() < 1e-6);
    const Eigen::VectorXd db = (probe.bias - ref.b).array() - (probe.bias - ref.b).mean();
    CHECK(db.cwiseAbs().maxCoeff() < 1e-6);
    for (int t = 0; t < 200; ++t) {
        Eigen::VectorXd q(d);
        for (int f = 0; f < d; ++f) q(f) = gaussian(rng, 0, 2);
        Eigen::Index best = 0;
        (ref.w * q + ref.b).maxCoeff(&best);
        CHECK(probe.predict(q) == static_cast<int>(best));
    }
}

TEST_CASE("probe input validation") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
    try {
        fit_linear_probe(x, std::vector<int>{1, 1, 1}, 2);
        FAIL("expected SingleClass");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingleClass);
    }
    x(1, 1) = std::nan("");
    try {
        fit_linear_probe(x, std::vector<int>{0, 1, 1}, 2);
        FAIL("expected NonFiniteFeature");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonFiniteFeature);
    }
}

TEST_CASE("label efficiency on separable embeddings") {
    EmbeddingSeries series;
    cadence::Rng rng(2);
    const std::vector<std::string> names{"walk", "run", "sit", "null"};
    for (int i = 0; i < 400; ++i) {
        EmbeddingRecord r;
        r.subject_id = "s";
        r.start_time_ms = i * 10'000;
        const int cls = i % 4;
        r.label = names[static_cast<std::size_t>(cls)];
        r.vector.assign(4, 0.0f);
        r.vector[static_cast<std::size_t>(cls)] = 1.0f;
        for (auto& v : r.vector) v += static_cast<float>(gaussian(rng, 0, 0.01));
        series.push_back(std::move(r));
    }
    ProbeConfig cfg;
    cfg.n_values = {1, 5, 10, 15, 25, 50};
    const auto report = label_efficiency_curve(series, cfg);
    // The null class is excluded from the probe.
    CHECK(report.class_counts.size() == 3);
    CHECK_FALSE(report.class_counts.contains("null"));
    std::set<int> ns;
    for (const auto& s : report.summary) {
        ns.insert(s.n);
        CHECK(s.repeats == 10);
        if (s.n == 1) CHECK(s.mean > 0.99);
    }
    CHECK(ns == std::set<int>{0, 1, 5, 10, 15, 25, 50});
    std::size_t per_n1 = 0;
    for (const auto& c : report.cells) per_n1 += c.n == 1;
    CHECK(per_n1 == 10);

    // Thread count does not change the numbers.
    const auto threaded = label_efficiency_curve(series, cfg, 3);
    CHECK(report_csv(threaded) == report_csv(report));
    CHECK(report_csv(report).rfind("source,n,repeat,accuracy\n", 0) == 0);
    CHECK(report_csv(report).find("embedding,full,0,") != std::string::npos);
}

TEST_CASE("summary statistics are mean and population spread") {
    AccuracyReport r;
    r.cells = {{"x", 5, 0, 0.5}, {"x", 5, 1, 0.7}, {"y", 5, 0, 1.0}};
    merge_reports(r, AccuracyReport{});
    const auto* s = r.find("x", 5);
    REQUIRE(s != nullptr);
    CHECK(s->mean == doctest::Approx(0.6));
    CHECK(s->stddev == doctest::Approx(0.1));
    CHECK(r.find("y", 5)->stddev == 0.0);
    CHECK(r.find("z", 5) == nullptr);
}
