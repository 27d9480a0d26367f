// Acceptance checks. Each criterion prints one PASS/FAIL line with its
// measured values and wall time. The exit status is non-zero if any criterion
// fails, except those listed with --known-failures (comma separated ids).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "cadence/embedding_io.hpp"
#include "cadence/evaluation.hpp"
#include "cadence/ingest.hpp"
#include "cadence/network.hpp"
#include "cadence/pairing.hpp"
#include "cadence/probe.hpp"
#include "cadence/random.hpp"
#include "cadence/segmentation.hpp"
#include "cadence/synth.hpp"
#include "cadence/text.hpp"
#include "cadence/training.hpp"

using namespace cadence;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::set<int> failed;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2d %-34s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) failed.insert(id);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Window noise_window(std::uint64_t seed) {
    Rng rng(seed);
    Window w;
    w.subject_id = "s";
    for (auto& v : w.data) v = gaussian(rng, 0.0, 0.5);
    return w;
}

PairBatch random_batch(int b, std::uint64_t seed) {
    std::vector<CoincidentPair> pairs;
    for (int i = 0; i < b; ++i) {
        CoincidentPair p;
        p.first = noise_window(seed + 2 * static_cast<std::uint64_t>(i));
        p.second = noise_window(seed + 2 * static_cast<std::uint64_t>(i) + 1);
        pairs.push_back(std::move(p));
    }
    return build_pair_batch(std::move(pairs), b);
}

// ---- criterion 5 oracle: every unordered pair enumerated directly.
double brute_salience(const std::vector<std::vector<float>>& e, int s, int t, int us, int ut) {
    auto cosine = [&](int i, int j) {
        double ab = 0, aa = 0, bb = 0;
        for (std::size_t k = 0; k < e[0].size(); ++k) {
            const double x = e[static_cast<std::size_t>(i)][k], y = e[static_cast<std::size_t>(j)][k];
            ab += x * y;
            aa += x * x;
            bb += y * y;
        }
        return ab / std::sqrt(aa * bb);
    };
    auto stats = [&](int lo, int hi) {
        std::vector<double> v;
        for (int i = lo; i < hi; ++i)
            for (int j = i + 1; j < hi; ++j) v.push_back(cosine(i, j));
        double m = 0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double var = 0;
        for (double x : v) var += (x - m) * (x - m);
        return std::pair{m, std::sqrt(var / static_cast<double>(v.size()))};
    };
    const auto [mi, si] = stats(s, t);
    const auto [mu, su] = stats(us, ut);
    (void)su;
    return mi - mu - 2 * si;
}

// ---- criterion 9 oracle: layouts on a 10 s grid, metrics by walking windows.
struct Layout {
    std::vector<SalientSegment> predicted;
    std::vector<TruthInterval> truth;
};

Layout random_layout(std::uint64_t seed) {
    Rng rng(seed);
    Layout l;
    const char* names[] = {"walk", "run", "cycle", "null"};
    std::int64_t cursor = static_cast<std::int64_t>(uniform_index(rng, 4));
    const int events = 2 + static_cast<int>(uniform_index(rng, 10));
    for (int i = 0; i < events; ++i) {
        const auto len = 1 + static_cast<std::int64_t>(uniform_index(rng, 20));
        l.truth.push_back({"", {names[uniform_index(rng, 4)], cursor * kWindowMs, (cursor + len) * kWindowMs}});
        cursor += len + (uniform_index(rng, 3) == 0 ? static_cast<std::int64_t>(uniform_index(rng, 5)) : 0);
    }
    const int preds = static_cast<int>(uniform_index(rng, 8));
    for (int i = 0; i < preds; ++i) {
        const auto s = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(cursor + 2)));
        const auto len = 3 + static_cast<std::int64_t>(uniform_index(rng, 25));
        l.predicted.push_back({"s", s * kWindowMs, (s + len) * kWindowMs, 1.0});
    }
    return l;
}

std::array<std::optional<double>, 4> window_oracle(const Layout& l) {
    auto labels_at = [&](std::int64_t k) {
        std::set<std::string> out;
        for (const auto& t : l.truth)
            if (t.interval.start_ms <= k * kWindowMs && k * kWindowMs < t.interval.end_ms) out.insert(t.interval.activity);
        return out;
    };
    auto predicted_at = [&](std::int64_t k) {
        for (const auto& p : l.predicted)
            if (p.start_time_ms <= k * kWindowMs && k * kWindowMs < p.end_time_ms) return true;
        return false;
    };
    std::int64_t pure = 0, pure_w = 0, all_w = 0;
    for (const auto& p : l.predicted) {
        std::set<std::string> seen;
        bool full = true;
        for (auto k = p.start_time_ms / kWindowMs; k < p.end_time_ms / kWindowMs; ++k) {
            const auto at = labels_at(k);
            full &= !at.empty();
            seen.insert(at.begin(), at.end());
        }
        const auto n = (p.end_time_ms - p.start_time_ms) / kWindowMs;
        all_w += n;
        if (full && seen.size() == 1 && *seen.begin() != "null") {
            ++pure;
            pure_w += n;
        }
    }
    std::int64_t events = 0, hit = 0, ev_w = 0, hit_w = 0;
    for (const auto& t : l.truth) {
        if (t.interval.activity == "null") continue;
        ++events;
        bool any = false;
        for (auto k = t.interval.start_ms / kWindowMs; k < t.interval.end_ms / kWindowMs; ++k) {
            ++ev_w;
            if (predicted_at(k)) {
                any = true;
                ++hit_w;
            }
        }
        hit += any;
    }
    std::array<std::optional<double>, 4> out;
    if (!l.predicted.empty()) {
        out[0] = static_cast<double>(pure) / static_cast<double>(l.predicted.size());
        out[2] = static_cast<double>(pure_w) / static_cast<double>(all_w);
    }
    if (events > 0) {
        out[1] = static_cast<double>(hit) / static_cast<double>(events);
        out[3] = static_cast<double>(hit_w) / static_cast<double>(ev_w);
    }
    return out;
}

// ---- criteria 7, 8 and 10.
struct RepresentationRun {
    std::vector<double> losses;
    EmbeddingSeries held_out;
    double trained = 0, untrained = 0, baseline = 0;
    double first100 = 0, last100 = 0;
};

RepresentationRun representation_run() {
    SynthConfig sc;
    sc.subjects = 20;
    sc.classes = 3;
    sc.seed = 7;
    const auto corpus = synth_corpus(sc);
    const std::vector<LabeledRecording> train_part(corpus.begin(), corpus.begin() + 14);
    const std::vector<LabeledRecording> test_part(corpus.begin() + 14, corpus.end());
    const auto train_windows = dataset_windows(train_part);
    const auto test_windows = dataset_windows(test_part);

    TrainConfig cfg;
    cfg.steps = 2000;
    cfg.seed = 3;
    cfg.pairing.batch_b = 128;
    RepresentationRun run;
    auto result = train(cfg, WindowIndex(train_windows));
    run.losses = result.losses;
    for (std::size_t i = 0; i < 100; ++i) {
        run.first100 += run.losses[i] / 100.0;
        run.last100 += run.losses[run.losses.size() - 1 - i] / 100.0;
    }

    ProbeConfig pc;
    pc.n_values = {10};
    pc.full_split = false;
    run.held_out = embed_windows(result.checkpoint.network, test_windows);
    run.trained = label_efficiency_curve(run.held_out, pc).find("embedding", 10)->mean;
    run.untrained = label_efficiency_curve(embed_windows(initial_network(cfg), test_windows), pc).find("embedding", 10)->mean;
    run.baseline = label_efficiency_curve(features_from_baseline(test_windows), pc, "baseline", true).find("baseline", 10)->mean;
    return run;
}

struct SegmentationRun {
    PlantedStream planted;
    std::vector<SalientSegment> segments;
};

SegmentationRun segmentation_run() {
    PlantedConfig cfg;
    cfg.seed = 11;
    SegmentationRun run{planted_segment_stream(cfg), {}};
    run.segments = segment_timeseries(run.planted.series);
    return run;
}

std::string loss_text(const std::vector<double>& losses) {
    std::ostringstream out;
    for (double l : losses) out << text::format_double(l, 17) << "\n";
    return out.str();
}

std::string embedding_bytes(const EmbeddingSeries& series, const fs::path& path) {
    write_embeddings(series, path);
    return text::read_file(path);
}

}  // namespace

std::set<int> parse_ids(const std::string& text) {
    std::set<int> ids;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) ids.insert(std::stoi(item));
    }
    return ids;
}

int main(int argc, char** argv) {
    std::set<int> known;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--known-failures" && i + 1 < argc) {
            known = parse_ids(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--known-failures ID[,ID...]]\n", argv[0]);
            return 2;
        }
    }
    const fs::path fixtures{CADENCE_FIXTURES};
    const auto scratch = fs::temp_directory_path() / "cadence_acceptance";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    criterion(1, "pair bookkeeping b=128", [] {
        const auto batch = random_batch(128, 1);
        const auto c = count_pair_categories(batch);
        const bool entries = batch.labels.size() == 65'536 && batch.weights.size() == 65'536;
        const bool split = c.identity == 256 && c.positive == 256 && c.negative == 65'024;
        bool weights = true;
        for (int p = 0; p < batch.size(); ++p)
            for (int q = 0; q < batch.size(); ++q) {
                const bool diag = p == q;
                const bool pos = !diag && p / 2 == q / 2;
                const double expect = diag ? 0.0 : pos ? 1.0 : 1.0 / 254.0;
                weights &= batch.weight(p, q) == expect;
            }
        std::ostringstream d;
        d << "entries=" << batch.labels.size() << " identity=" << c.identity << " positive=" << c.positive
          << " negative=" << c.negative << " negative_weight=1/254";
        return Outcome{entries && split && weights, d.str()};
    });

    criterion(2, "gradient check", [] {
        Architecture a;
        a.widths = {2, 2};
        a.embed_dim = 8;
        a.projector_hidden = 6;
        const auto net = Network<double>::initialized(a, 5);
        const auto batch = random_batch(2, 40);
        const double err = gradient_check(net, batch, 1e-5, 32, 9);
        const GradientFn corrupted = [](const PairBatch& b, const Network<double>& n) {
            auto r = backprop_gradients(b, n);
            const auto& s = n.layout.find("dense.weight");
            for (std::size_t i = 0; i < s.size; ++i) r.grads[s.offset + i] *= 2.0;
            return r;
        };
        const double bad = gradient_check(net, batch, 1e-5, 32, 9, corrupted);
        return Outcome{err < 1e-4 && bad >= 1e-4, "max_rel_err=" + fmt("%.3g", err) + " corrupted=" + fmt("%.3g", bad)};
    });

    criterion(3, "window count for 42000 h", [] {
        const auto n = window_count_for_hours(42'000);
        return Outcome{n == 15'120'000, "windows=" + std::to_string(n)};
    });

    criterion(4, "boundary pairs per block", [] {
        const auto n = boundary_pair_count(kBlockWindows);
        std::vector<std::vector<float>> e;
        Rng rng(1);
        for (int i = 0; i < kBlockWindows; ++i) e.push_back({static_cast<float>(gaussian(rng)), static_cast<float>(gaussian(rng)), 1.0f});
        ProposalStats stats;
        propose_segments(SimilarityBlock(e), &stats);
        return Outcome{n == 16'110 && stats.enumerated == 16'110,
                       "count=" + std::to_string(n) + " enumerated=" + std::to_string(stats.enumerated)};
    });

    criterion(5, "salience vs pair enumeration", [] {
        double worst = 0;
        std::int64_t checked = 0;
        for (int trial = 0; trial < 100; ++trial) {
            Rng rng(mix_seed(5, static_cast<std::uint64_t>(trial)));
            const int w = 3 + static_cast<int>(uniform_index(rng, 58));
            const int dim = 4 + static_cast<int>(uniform_index(rng, 30));
            std::vector<std::vector<float>> e(static_cast<std::size_t>(w), std::vector<float>(static_cast<std::size_t>(dim)));
            for (auto& v : e)
                for (auto& x : v) x = static_cast<float>(gaussian(rng));
            SimilarityBlock block(e);
            for (int s = 0; s < w; ++s)
                for (int t = s + kMinSegmentWindows; t <= w; ++t) {
                    const auto p = make_proposal(s, t, w);
                    const double diff = std::abs(salience(block, p) - brute_salience(e, s, t, s - p.before, t + p.after));
                    worst = std::max(worst, diff);
                    ++checked;
                }
        }
        return Outcome{worst < 1e-9, "proposals=" + std::to_string(checked) + " max_abs_diff=" + fmt("%.3g", worst)};
    });

    criterion(6, "six plus six salience", [] {
        std::vector<std::vector<float>> e;
        for (int i = 0; i < 12; ++i) e.push_back(i < 6 ? std::vector<float>{1, 0} : std::vector<float>{0, 1});
        SegmentProposal p;
        p.start = 0;
        p.end = 6;
        p.after = 6;
        const double s = salience(SimilarityBlock(e), p);
        return Outcome{std::abs(s - 6.0 / 11.0) < 1e-12, "salience=" + fmt("%.15f", s)};
    });

    RepresentationRun rep;
    criterion(7, "synthetic representation quality", [&] {
        rep = representation_run();
        const bool ok = rep.trained >= 0.90 && rep.trained - rep.untrained >= 0.05 && rep.trained - rep.baseline >= 0.05 &&
                        rep.last100 < rep.first100;
        std::ostringstream d;
        d << "acc@10 trained=" << fmt("%.3f", rep.trained) << " untrained=" << fmt("%.3f", rep.untrained)
          << " baseline=" << fmt("%.3f", rep.baseline) << " loss " << fmt("%.3f", rep.first100) << "->" << fmt("%.3f", rep.last100);
        return Outcome{ok, d.str()};
    });

    SegmentationRun seg;
    criterion(8, "planted segment recovery", [&] {
        seg = segmentation_run();
        const auto m = event_metrics(seg.segments, seg.planted.truth);
        const bool ok = m.precision && m.recall && *m.precision >= 0.99 && *m.recall == 1.0;
        // Informational: how often other seeds of the same construction pass.
        int passing = 0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            PlantedConfig cfg;
            cfg.seed = s;
            const auto other = planted_segment_stream(cfg);
            const auto om = event_metrics(segment_timeseries(other.series), other.truth);
            passing += om.precision.value_or(0) >= 0.99 && om.recall.value_or(0) == 1.0;
        }
        return Outcome{ok, "segments=" + std::to_string(seg.segments.size()) + " event_precision=" +
                               fmt("%.3f", m.precision.value_or(-1)) + " event_recall=" + fmt("%.3f", m.recall.value_or(-1)) +
                               " seeds_passing=" + std::to_string(passing) + "/100"};
    });

    criterion(9, "metrics vs window enumeration", [] {
        int matched = 0;
        for (int i = 0; i < 25; ++i) {
            const auto l = random_layout(mix_seed(9, static_cast<std::uint64_t>(i)));
            const auto ev = event_metrics(l.predicted, l.truth);
            const auto win = window_metrics(l.predicted, l.truth);
            const auto o = window_oracle(l);
            matched += ev.precision == o[0] && ev.recall == o[1] && win.precision == o[2] && win.recall == o[3];
        }
        return Outcome{matched == 25, "layouts_matched=" + std::to_string(matched) + "/25"};
    });

    criterion(10, "determinism on rerun", [&] {
        const auto rep2 = representation_run();
        const auto seg2 = segmentation_run();
        const bool losses = loss_text(rep.losses) == loss_text(rep2.losses);
        const bool embeddings = embedding_bytes(rep.held_out, scratch / "a.bin") == embedding_bytes(rep2.held_out, scratch / "b.bin");
        const bool segments = segments_csv(seg.segments) == segments_csv(seg2.segments);
        std::ostringstream d;
        d << "losses=" << (losses ? "identical" : "differ") << " embeddings=" << (embeddings ? "identical" : "differ")
          << " segments=" << (segments ? "identical" : "differ");
        return Outcome{losses && embeddings && segments && !rep.losses.empty(), d.str()};
    });

    criterion(11, "dataset parser fidelity", [&] {
        const std::pair<DatasetKind, const char*> layouts[] = {{DatasetKind::Pamap2, "pamap2"},
                                                               {DatasetKind::MHealth, "mhealth"},
                                                               {DatasetKind::HmpAdl, "hmpadl"},
                                                               {DatasetKind::DailySports, "dailysports"}};
        const double expected[] = {100.0, 50.0, 32.0, 25.0};
        bool ok = true;
        std::ostringstream d;
        for (int i = 0; i < 4; ++i) {
            const auto data = load_dataset(describe(layouts[i].first), fixtures / layouts[i].second);
            bool rates = !data.empty();
            bool inside = true;
            std::size_t intervals = 0;
            for (const auto& lr : data) {
                rates &= lr.recording.sample_rate_hz == expected[i];
                const auto end = static_cast<std::int64_t>(std::llround(lr.recording.end_time_ms()));
                for (const auto& iv : lr.intervals) {
                    ++intervals;
                    inside &= iv.start_ms >= lr.recording.start_time_ms && iv.end_ms <= end && iv.start_ms < iv.end_ms;
                }
            }
            ok &= rates && inside && intervals > 0;
            d << layouts[i].second << "=" << (data.empty() ? 0.0 : data[0].recording.sample_rate_hz) << "Hz/" << intervals
              << (i < 3 ? " " : "");
        }
        return Outcome{ok, d.str()};
    });

    fs::remove_all(scratch);
    std::printf("%zu of 11 criteria failed\n", failed.size());
    int unexpected = 0;
    for (int id : failed) {
        if (known.count(id)) {
            std::printf("criterion %d failed as recorded in --known-failures\n", id);
        } else {
            ++unexpected;
        }
    }
    for (int id : known) {
        if (!failed.count(id)) {
            std::printf("criterion %d listed in --known-failures but passed\n", id);
            ++unexpected;
        }
    }
    return unexpected == 0 ? 0 : 1;
}
