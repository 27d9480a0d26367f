#include "cadence/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "cadence/checkpoint.hpp"
#include "cadence/config.hpp"
#include "cadence/embedding_io.hpp"
#include "cadence/error.hpp"
#include "cadence/evaluation.hpp"
#include "cadence/ingest.hpp"
#include "cadence/parallel.hpp"
#include "cadence/random.hpp"
#include "cadence/segmentation.hpp"
#include "cadence/synth.hpp"
#include "cadence/text.hpp"
#include "cadence/training.hpp"

namespace cadence {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Manifest {
    std::string command;
    std::optional<std::uint64_t> config_hash;
    std::optional<std::uint64_t> seed;
    json inputs = json::object();
    json outputs = json::object();
    json extra = json::object();
};

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_manifest(const Manifest& m, const fs::path& dir, std::chrono::steady_clock::time_point started) {
    json j;
    j["command"] = m.command;
    j["config_hash"] = m.config_hash ? json(hex(*m.config_hash)) : json(nullptr);
    j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["tool_version"] = kToolVersion;
    j["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!m.extra.empty()) j["details"] = m.extra;
    fs::create_directories(dir);
    text::write_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

fs::path output_dir_of_file(const fs::path& file) {
    const auto parent = file.parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

Settings load_settings(const std::string& config_path) {
    if (config_path.empty()) return Settings{};
    return parse_settings(text::read_file(config_path));
}

std::vector<TruthInterval> load_truth(const fs::path& path) {
    if (fs::is_directory(path)) {
        std::vector<TruthInterval> truth;
        for (const auto& rec : read_canonical(path)) {
            for (const auto& iv : rec.intervals) truth.push_back({rec.recording.subject_id, iv});
        }
        return truth;
    }
    return parse_truth_csv(text::read_file(path));
}

void ensure_exists(const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) throw Error(ErrorKind::Io, what + " not found: " + p.string());
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-supervised accelerometer embeddings and salient activity segmentation", "cadence"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::optional<int> threads_opt;
    std::function<void()> action;
    const auto started = std::chrono::steady_clock::now();
    Manifest manifest;
    fs::path manifest_dir;

    auto add_threads = [&](CLI::App* sub) {
        sub->add_option("--threads", threads_opt, "Worker threads (default: CADENCE_THREADS or 1)")->check(CLI::PositiveNumber);
    };

    // ingest
    std::string ingest_dataset, ingest_root, ingest_out;
    bool ingest_antialias = false;
    auto* ingest = app.add_subcommand("ingest", "Convert a public dataset layout into canonical 30 Hz CSV");
    ingest->add_option("--dataset", ingest_dataset, "pamap2 | mhealth | hmpadl | dailysports | canonical")->required();
    ingest->add_option("--root", ingest_root, "Dataset root directory")->required();
    ingest->add_option("--out", ingest_out, "Output directory")->required();
    ingest->add_flag("--antialias", ingest_antialias, "Low-pass before downsampling");
    ingest->callback([&] {
        action = [&] {
            const auto descriptor = describe(parse_dataset_kind(ingest_dataset));
            ensure_exists(ingest_root, "dataset root");
            const auto data = load_dataset(descriptor, ingest_root);
            std::vector<LabeledRecording> converted;
            for (const auto& lr : data) {
                if (lr.recording.samples.size() < 2) continue;
                converted.push_back({normalize_and_resample(lr.recording, {ingest_antialias}), lr.intervals});
            }
            write_canonical(converted, ingest_out);
            out << "ingested " << converted.size() << " recordings (" << to_string(descriptor.kind) << ", "
                << descriptor.sample_rate_hz << " Hz native)\n";
            manifest.command = "ingest";
            manifest.inputs = {{"dataset", ingest_dataset}, {"root", ingest_root}};
            manifest.outputs = {{"canonical", ingest_out}};
            manifest.extra = {{"recordings", converted.size()}, {"native_rate_hz", descriptor.sample_rate_hz}};
            manifest_dir = ingest_out;
        };
    });

    // synth
    SynthConfig synth_cfg;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic activity corpus");
    synth->add_option("--classes", synth_cfg.classes, "Number of activity classes")->capture_default_str();
    synth->add_option("--subjects", synth_cfg.subjects, "Number of subjects")->capture_default_str();
    synth->add_option("--minutes", synth_cfg.minutes_per_subject, "Minutes per subject")->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed, "Random seed")->capture_default_str();
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->callback([&] {
        action = [&] {
            const auto data = synth_corpus(synth_cfg);
            write_canonical(data, synth_out);
            out << "wrote " << data.size() << " synthetic recordings\n";
            manifest.command = "synth";
            manifest.seed = synth_cfg.seed;
            manifest.outputs = {{"canonical", synth_out}};
            manifest.extra = {{"classes", synth_cfg.classes}, {"subjects", synth_cfg.subjects},
                              {"minutes_per_subject", synth_cfg.minutes_per_subject}};
            manifest_dir = synth_out;
        };
    });

    // train
    std::string train_config, train_data, train_out, train_resume;
    std::optional<std::int64_t> train_steps;
    std::optional<std::uint64_t> train_seed;
    auto* train_cmd = app.add_subcommand("train", "Contrastive pre-training on a canonical dataset");
    train_cmd->add_option("--config", train_config, "Key-value configuration file");
    train_cmd->add_option("--data", train_data, "Canonical dataset directory")->required();
    train_cmd->add_option("--out", train_out, "Output directory")->required();
    train_cmd->add_option("--steps", train_steps, "Override train.steps")->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", train_seed, "Override train.seed");
    train_cmd->add_option("--resume", train_resume, "Checkpoint to continue from");
    add_threads(train_cmd);
    train_cmd->callback([&] {
        action = [&] {
            auto settings = load_settings(train_config);
            if (train_steps) settings.train.steps = *train_steps;
            if (train_seed) settings.train.seed = *train_seed;
            settings.train.validate();
            ensure_exists(train_data, "data directory");
            const WindowIndex index(dataset_windows(read_canonical(train_data)));
            std::optional<Checkpoint> resume;
            if (!train_resume.empty()) resume = load_checkpoint(train_resume, settings.train.arch);
            fs::create_directories(train_out);
            const fs::path out_dir(train_out);
            TrainHooks hooks;
            hooks.on_checkpoint = [&](const Checkpoint& c) {
                save_checkpoint(c, out_dir / ("checkpoint_step" + std::to_string(c.step) + ".bin"));
            };
            const auto result = train(settings.train, index, resume, hooks);
            save_checkpoint(result.checkpoint, out_dir / "checkpoint.bin");
            std::ostringstream loss;
            loss << "step,loss\n";
            const std::int64_t first = result.checkpoint.step - static_cast<std::int64_t>(result.losses.size()) + 1;
            for (std::size_t i = 0; i < result.losses.size(); ++i) {
                loss << first + static_cast<std::int64_t>(i) << "," << text::format_double(result.losses[i]) << "\n";
            }
            text::write_file_atomic(out_dir / "loss.csv", loss.str());
            text::write_file_atomic(out_dir / "config.txt", settings_to_text(settings));
            out << "trained to step " << result.checkpoint.step << " on " << index.size() << " windows\n";
            manifest.command = "train";
            manifest.config_hash = config_hash(settings.train);
            manifest.seed = settings.train.seed;
            manifest.inputs = {{"data", train_data}, {"config", train_config}, {"resume", train_resume}};
            manifest.outputs = {{"checkpoint", (out_dir / "checkpoint.bin").string()}, {"loss", (out_dir / "loss.csv").string()}};
            manifest_dir = out_dir;
        };
    });

    // embed
    std::string embed_ckpt, embed_data, embed_out;
    auto* embed = app.add_subcommand("embed", "Embed every window of a canonical dataset");
    embed->add_option("--checkpoint", embed_ckpt, "Trained checkpoint")->required();
    embed->add_option("--data", embed_data, "Canonical dataset directory")->required();
    embed->add_option("--out", embed_out, "Embeddings file")->required();
    embed->callback([&] {
        action = [&] {
            const auto ckpt = load_checkpoint(embed_ckpt);
            ensure_exists(embed_data, "data directory");
            const auto windows = dataset_windows(read_canonical(embed_data));
            const auto series = embed_windows(ckpt.network, windows);
            if (!output_dir_of_file(embed_out).empty()) fs::create_directories(output_dir_of_file(embed_out));
            write_embeddings(series, embed_out);
            out << "embedded " << series.size() << " windows\n";
            manifest.command = "embed";
            manifest.config_hash = ckpt.config_hash;
            manifest.seed = ckpt.seed;
            manifest.inputs = {{"checkpoint", embed_ckpt}, {"data", embed_data}};
            manifest.outputs = {{"embeddings", embed_out}, {"index", embedding_index_path(embed_out).string()}};
            manifest_dir = output_dir_of_file(embed_out);
        };
    });

    // probe
    std::string probe_emb, probe_config, probe_out, probe_baseline;
    std::optional<std::uint64_t> probe_seed;
    auto* probe = app.add_subcommand("probe", "Label-efficiency curve of a linear probe on frozen embeddings");
    probe->add_option("--embeddings", probe_emb, "Embeddings file")->required();
    probe->add_option("--config", probe_config, "Key-value configuration file");
    probe->add_option("--out", probe_out, "Report CSV")->required();
    probe->add_option("--baseline-data", probe_baseline, "Canonical dataset for the 8-feature baseline");
    probe->add_option("--seed", probe_seed, "Override probe.seed");
    add_threads(probe);
    probe->callback([&] {
        action = [&] {
            auto settings = load_settings(probe_config);
            if (probe_seed) settings.probe.seed = *probe_seed;
            settings.probe.validate();
            const int threads = resolve_threads(threads_opt);
            auto report = label_efficiency_curve(read_embeddings(probe_emb), settings.probe, threads);
            if (!probe_baseline.empty()) {
                ensure_exists(probe_baseline, "baseline data directory");
                const auto windows = dataset_windows(read_canonical(probe_baseline));
                merge_reports(report, label_efficiency_curve(features_from_baseline(windows), settings.probe, "baseline", true, threads));
            }
            fs::create_directories(output_dir_of_file(probe_out));
            text::write_file_atomic(probe_out, report_csv(report));
            for (const auto& s : report.summary) {
                out << s.source << " n=" << (s.n == 0 ? std::string("full") : std::to_string(s.n)) << " accuracy "
                    << s.mean << " +/- " << s.stddev << "\n";
            }
            manifest.command = "probe";
            manifest.seed = settings.probe.seed;
            manifest.inputs = {{"embeddings", probe_emb}, {"config", probe_config}, {"baseline_data", probe_baseline}};
            manifest.outputs = {{"report", probe_out}};
            manifest_dir = output_dir_of_file(probe_out);
        };
    });

    // segment
    std::string seg_emb, seg_out;
    auto* segment = app.add_subcommand("segment", "Salient activity segmentation of an embedding stream");
    segment->add_option("--embeddings", seg_emb, "Embeddings file")->required();
    segment->add_option("--out", seg_out, "Segments CSV")->required();
    add_threads(segment);
    segment->callback([&] {
        action = [&] {
            const auto segments = segment_timeseries(read_embeddings(seg_emb), resolve_threads(threads_opt));
            fs::create_directories(output_dir_of_file(seg_out));
            text::write_file_atomic(seg_out, segments_csv(segments));
            out << "found " << segments.size() << " salient segments\n";
            manifest.command = "segment";
            manifest.inputs = {{"embeddings", seg_emb}};
            manifest.outputs = {{"segments", seg_out}};
            manifest_dir = output_dir_of_file(seg_out);
        };
    });

    // eval-seg
    std::string eval_segments, eval_labels, eval_out;
    auto* eval = app.add_subcommand("eval-seg", "Event and window precision/recall of segments against labels");
    eval->add_option("--segments", eval_segments, "Segments CSV")->required();
    eval->add_option("--labels", eval_labels, "Labels CSV or canonical dataset directory")->required();
    eval->add_option("--out", eval_out, "Report CSV")->required();
    eval->callback([&] {
        action = [&] {
            ensure_exists(eval_segments, "segments file");
            ensure_exists(eval_labels, "labels");
            const auto segments = parse_segments_csv(text::read_file(eval_segments));
            const auto report = evaluate_segmentation(segments, load_truth(eval_labels));
            fs::create_directories(output_dir_of_file(eval_out));
            const auto csv = seg_eval_csv(report);
            text::write_file_atomic(eval_out, csv);
            out << csv;
            manifest.command = "eval-seg";
            manifest.inputs = {{"segments", eval_segments}, {"labels", eval_labels}};
            manifest.outputs = {{"report", eval_out}};
            manifest_dir = output_dir_of_file(eval_out);
        };
    });

    // augment-preview
    std::string aug_data, aug_out, aug_config;
    std::size_t aug_window = 0;
    std::uint64_t aug_seed = 0;
    auto* aug = app.add_subcommand("augment-preview", "Write one window next to a randomly augmented copy");
    aug->add_option("--data", aug_data, "Canonical dataset directory")->required();
    aug->add_option("--window", aug_window, "Window position in the dataset")->capture_default_str();
    aug->add_option("--config", aug_config, "Key-value configuration file (augment.* ranges)");
    aug->add_option("--seed", aug_seed, "Random seed")->capture_default_str();
    aug->add_option("--out", aug_out, "Output CSV")->required();
    aug->callback([&] {
        action = [&] {
            const auto settings = load_settings(aug_config);
            ensure_exists(aug_data, "data directory");
            const auto windows = dataset_windows(read_canonical(aug_data));
            if (aug_window >= windows.size()) {
                throw Error(ErrorKind::OutOfBounds, "window " + std::to_string(aug_window) + " of " + std::to_string(windows.size()));
            }
            const auto& w = windows[aug_window];
            const auto chain = sample_augmentation_chain(aug_seed, settings.train.ranges);
            const auto augmented = apply_chain(chain, w, mix_seed(aug_seed, 1));
            std::ostringstream csv;
            csv << "t,ax,ay,az,aug_ax,aug_ay,aug_az\n";
            for (int t = 0; t < kWindowSamples; ++t) {
                csv << t;
                for (int a = 0; a < kAxes; ++a) csv << "," << text::format_double(w.at(t, a));
                for (int a = 0; a < kAxes; ++a) csv << "," << text::format_double(augmented.at(t, a));
                csv << "\n";
            }
            fs::create_directories(output_dir_of_file(aug_out));
            text::write_file_atomic(aug_out, csv.str());
            json kinds = json::array();
            for (const auto& spec : chain) kinds.push_back(to_string(spec.kind));
            out << "chain:";
            for (const auto& k : kinds) out << " " << k.get<std::string>();
            out << "\n";
            manifest.command = "augment-preview";
            manifest.seed = aug_seed;
            manifest.inputs = {{"data", aug_data}, {"window", aug_window}};
            manifest.outputs = {{"preview", aug_out}};
            manifest.extra = {{"chain", kinds}};
            manifest_dir = output_dir_of_file(aug_out);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        action();
        write_manifest(manifest, manifest_dir, started);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::InvalidArgument) {
            for (auto* sub : app.get_subcommands()) err << sub->help();
            return 1;
        }
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace cadence
