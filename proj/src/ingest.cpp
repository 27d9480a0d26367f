#include "cadence/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <sstream>

#include "cadence/error.hpp"
#include "cadence/text.hpp"

namespace fs = std::filesystem;

namespace cadence {

namespace {

[[noreturn]] void parse_error(const fs::path& file, std::size_t line, const std::string& what) {
    throw Error(ErrorKind::RecordParse, file.string() + ":" + std::to_string(line) + ": " + what);
}

bool is_nan_token(std::string_view s) {
    s = text::trim(s);
    if (s.size() != 3) return false;
    return (s[0] == 'n' || s[0] == 'N') && (s[1] == 'a' || s[1] == 'A') && (s[2] == 'n' || s[2] == 'N');
}

std::vector<std::string_view> lines_of(const std::string& contents) {
    auto lines = text::split(contents, '\n');
    if (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

// Per-sample activity codes collapsed into intervals on the recording's
// implied time grid.
std::vector<LabeledInterval> intervals_from_codes(const Recording& rec, const std::vector<int>& codes,
                                                  const std::map<int, std::string>& names) {
    std::vector<LabeledInterval> out;
    std::size_t i = 0;
    while (i < codes.size()) {
        std::size_t j = i;
        while (j < codes.size() && codes[j] == codes[i]) ++j;
        const auto name = names.at(codes[i]);
        out.push_back({name, static_cast<std::int64_t>(std::llround(rec.time_of(i))),
                       static_cast<std::int64_t>(std::llround(rec.time_of(j)))});
        i = j;
    }
    return out;
}

struct Row {
    double t_s;
    Vec3 acc;
    int code;
};

// Splits timestamped rows into contiguous streams.
std::vector<LabeledRecording> streams_from_rows(const std::vector<Row>& rows, const DatasetDescriptor& d,
                                                const std::string& subject, const std::string& device) {
    std::vector<LabeledRecording> out;
    const double max_gap = 2.0 / d.sample_rate_hz;
    std::size_t begin = 0;
    while (begin < rows.size()) {
        std::size_t end = begin + 1;
        while (end < rows.size() && rows[end].t_s - rows[end - 1].t_s <= max_gap + 1e-9) ++end;
        LabeledRecording lr;
        Recording& rec = lr.recording;
        rec.subject_id = subject;
        rec.device_id = device;
        rec.sample_rate_hz = d.sample_rate_hz;
        rec.unit_scale = d.unit_scale;
        rec.start_time_ms = std::llround(rows[begin].t_s * 1000.0);
        std::vector<int> codes;
        for (std::size_t i = begin; i < end; ++i) {
            rec.samples.push_back(rows[i].acc);
            codes.push_back(rows[i].code);
        }
        lr.intervals = intervals_from_codes(rec, codes, d.activities);
        out.push_back(std::move(lr));
        begin = end;
    }
    return out;
}

std::vector<fs::path> sorted_entries(const fs::path& dir, auto&& keep) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (keep(e)) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
    return out.empty() ? "x" : out;
}

// HMP file names carry the recording start: Accelerometer-YYYY-MM-DD-HH-MM-SS-<activity>-<volunteer>.txt
std::int64_t hmp_start_ms(const std::vector<std::string_view>& parts, const fs::path& file) {
    if (parts.size() < 9) parse_error(file, 0, "unexpected HMP file name");
    std::array<int, 6> f{};
    for (int i = 0; i < 6; ++i) {
        const auto v = text::parse_int(parts[static_cast<std::size_t>(i + 1)]);
        if (!v) parse_error(file, 0, "bad timestamp in file name");
        f[static_cast<std::size_t>(i)] = static_cast<int>(*v);
    }
    using namespace std::chrono;
    const sys_days day = year{f[0]} / month{static_cast<unsigned>(f[1])} / static_cast<unsigned>(f[2]);
    const auto tp = day + hours{f[3]} + minutes{f[4]} + seconds{f[5]};
    return duration_cast<milliseconds>(tp.time_since_epoch()).count();
}

const std::vector<std::string>& hmp_activities() {
    static const std::vector<std::string> names = {
        "Brush_teeth", "Climb_stairs",  "Comb_hair",     "Descend_stairs", "Drink_glass",
        "Eat_meat",    "Eat_soup",      "Getup_bed",     "Liedown_bed",    "Pour_water",
        "Sitdown_chair", "Standup_chair", "Use_telephone", "Walk"};
    return names;
}

std::vector<LabeledRecording> load_hmpadl(const fs::path& root) {
    std::vector<LabeledRecording> out;
    for (const auto& activity : hmp_activities()) {
        const auto files = sorted_entries(root / activity, [](const fs::directory_entry& e) {
            return e.is_regular_file() && e.path().extension() == ".txt";
        });
        for (const auto& f : files) out.push_back(parse_hmpadl_file(f, activity));
    }
    return out;
}

std::vector<LabeledRecording> load_dailysports(const fs::path& root, const DatasetDescriptor& d) {
    std::vector<LabeledRecording> out;
    const fs::path base = fs::is_directory(root / "data") ? root / "data" : root;
    for (const auto& [code, name] : d.activities) {
        char dirname[8];
        std::snprintf(dirname, sizeof dirname, "a%02d", code);
        const auto subjects = sorted_entries(base / dirname, [](const fs::directory_entry& e) {
            return e.is_directory();
        });
        for (const auto& subject_dir : subjects) {
            const auto segments = sorted_entries(subject_dir, [](const fs::directory_entry& e) {
                return e.is_regular_file() && e.path().extension() == ".txt";
            });
            if (segments.empty()) continue;
            std::array<LabeledRecording, 2> sides;   // right, left
            const std::array<int, 2> offsets{0, 9};
            const std::array<const char*, 2> names{"xsens-right-arm", "xsens-left-arm"};
            for (int s = 0; s < 2; ++s) {
                Recording& rec = sides[static_cast<std::size_t>(s)].recording;
                rec.subject_id = subject_dir.filename().string();
                rec.device_id = names[static_cast<std::size_t>(s)];
                rec.sample_rate_hz = d.sample_rate_hz;
                rec.unit_scale = d.unit_scale;
                // Streams carry no wall clock; activities are laid out an hour apart.
                rec.start_time_ms = static_cast<std::int64_t>(code - 1) * 3'600'000;
            }
            for (const auto& seg : segments) {
                const auto contents = text::read_file(seg);
                const auto lines = lines_of(contents);
                for (std::size_t ln = 0; ln < lines.size(); ++ln) {
                    if (text::trim(lines[ln]).empty()) continue;
                    const auto fields = text::split(lines[ln], ',');
                    if (fields.size() < 21) {
                        throw Error(ErrorKind::MissingColumns, seg.string() + ":" + std::to_string(ln + 1) +
                                                                   ": expected 45 columns");
                    }
                    for (int s = 0; s < 2; ++s) {
                        Vec3 acc{};
                        for (int a = 0; a < 3; ++a) {
                            const auto col = static_cast<std::size_t>(d.columns[static_cast<std::size_t>(a)] +
                                                                      offsets[static_cast<std::size_t>(s)]);
                            const auto v = text::parse_double(fields[col]);
                            if (!v) parse_error(seg, ln + 1, "non-numeric acceleration");
                            acc[static_cast<std::size_t>(a)] = *v;
                        }
                        sides[static_cast<std::size_t>(s)].recording.samples.push_back(acc);
                    }
                }
            }
            for (auto& side : sides) {
                const auto& rec = side.recording;
                side.intervals.push_back({d.activities.at(code), rec.start_time_ms,
                                          static_cast<std::int64_t>(std::llround(rec.end_time_ms()))});
                out.push_back(std::move(side));
            }
        }
    }
    return out;
}

}  // namespace

DatasetKind parse_dataset_kind(const std::string& name) {
    if (name == "pamap2") return DatasetKind::Pamap2;
    if (name == "mhealth") return DatasetKind::MHealth;
    if (name == "hmpadl") return DatasetKind::HmpAdl;
    if (name == "dailysports") return DatasetKind::DailySports;
    if (name == "canonical") return DatasetKind::Canonical;
    throw Error(ErrorKind::UnknownLayout, "unknown dataset '" + name + "'");
}

std::string to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::Pamap2: return "pamap2";
        case DatasetKind::MHealth: return "mhealth";
        case DatasetKind::HmpAdl: return "hmpadl";
        case DatasetKind::DailySports: return "dailysports";
        case DatasetKind::Canonical: return "canonical";
    }
    return "unknown";
}

DatasetDescriptor describe(DatasetKind kind) {
    DatasetDescriptor d;
    d.kind = kind;
    switch (kind) {
        case DatasetKind::Pamap2:
            // Hand IMU block starts at column 3 (temperature); 4..6 is the +-16 g accelerometer.
            d.sample_rate_hz = 100.0;
            d.columns = {4, 5, 6};
            d.unit_scale = 1.0 / kStandardGravity;
            d.activities = {{0, "null"},
                            {1, "lying"},
                            {2, "sitting"},
                            {3, "standing"},
                            {4, "walking"},
                            {5, "running"},
                            {6, "cycling"},
                            {7, "nordic_walking"},
                            {9, "watching_tv"},
                            {10, "computer_work"},
                            {11, "car_driving"},
                            {12, "ascending_stairs"},
                            {13, "descending_stairs"},
                            {16, "vacuum_cleaning"},
                            {17, "ironing"},
                            {18, "folding_laundry"},
                            {19, "house_cleaning"},
                            {20, "playing_soccer"},
                            {24, "rope_jumping"}};
            break;
        case DatasetKind::MHealth:
            // Right lower arm accelerometer.
            d.sample_rate_hz = 50.0;
            d.columns = {14, 15, 16};
            d.unit_scale = 1.0 / kStandardGravity;
            d.activities = {{0, "null"},
                            {1, "standing_still"},
                            {2, "sitting_relaxing"},
                            {3, "lying_down"},
                            {4, "walking"},
                            {5, "climbing_stairs"},
                            {6, "waist_bends_forward"},
                            {7, "frontal_elevation_of_arms"},
                            {8, "knees_bending"},
                            {9, "cycling"},
                            {10, "jogging"},
                            {11, "running"},
                            {12, "jump_front_back"}};
            break;
        case DatasetKind::HmpAdl:
            // Coded 0..63 per axis, mapped to [-1.5, 1.5] g during parsing.
            d.sample_rate_hz = 32.0;
            d.columns = {0, 1, 2};
            d.unit_scale = 1.0;
            for (std::size_t i = 0; i < hmp_activities().size(); ++i) {
                d.activities[static_cast<int>(i + 1)] = hmp_activities()[i];
            }
            break;
        case DatasetKind::DailySports:
            // Unit order T, RA, LA, RL, LL with 9 channels each; RA acc = 9..11, LA acc = 18..20.
            d.sample_rate_hz = 25.0;
            d.columns = {9, 10, 11};
            d.unit_scale = 1.0 / kStandardGravity;
            d.activities = {{1, "sitting"},
                            {2, "standing"},
                            {3, "lying_on_back"},
                            {4, "lying_on_right_side"},
                            {5, "ascending_stairs"},
                            {6, "descending_stairs"},
                            {7, "standing_in_elevator"},
                            {8, "moving_in_elevator"},
                            {9, "walking_parking_lot"},
                            {10, "walking_treadmill_flat"},
                            {11, "walking_treadmill_incline"},
                            {12, "running_treadmill"},
                            {13, "stepper"},
                            {14, "cross_trainer"},
                            {15, "cycling_horizontal"},
                            {16, "cycling_vertical"},
                            {17, "rowing"},
                            {18, "jumping"},
                            {19, "basketball"}};
            break;
        case DatasetKind::Canonical:
            break;
    }
    return d;
}

std::vector<LabeledRecording> parse_pamap2_file(const fs::path& file) {
    const auto d = describe(DatasetKind::Pamap2);
    const auto contents = text::read_file(file);
    const auto lines = lines_of(contents);
    const int needed = *std::max_element(d.columns.begin(), d.columns.end()) + 1;
    std::vector<Row> rows;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto fields = text::split_ws(lines[ln]);
        if (fields.empty()) continue;
        if (static_cast<int>(fields.size()) < needed) {
            throw Error(ErrorKind::MissingColumns,
                        file.string() + ":" + std::to_string(ln + 1) + ": expected 54 columns");
        }
        const auto t = text::parse_double(fields[0]);
        const auto code = text::parse_int(fields[1]);
        if (!t || !code) parse_error(file, ln + 1, "bad timestamp or activity id");
        if (!d.activities.contains(static_cast<int>(*code))) {
            parse_error(file, ln + 1, "unknown activity id " + std::to_string(*code));
        }
        Row row{*t, {}, static_cast<int>(*code)};
        bool missing = false;
        for (int a = 0; a < 3; ++a) {
            const auto field = fields[static_cast<std::size_t>(d.columns[static_cast<std::size_t>(a)])];
            if (is_nan_token(field)) {
                missing = true;
                break;
            }
            const auto v = text::parse_double(field);
            if (!v) parse_error(file, ln + 1, "non-numeric acceleration");
            row.acc[static_cast<std::size_t>(a)] = *v;
        }
        if (!missing) rows.push_back(row);
    }
    return streams_from_rows(rows, d, file.stem().string(), "colibri-hand");
}

std::vector<LabeledRecording> parse_mhealth_file(const fs::path& file) {
    const auto d = describe(DatasetKind::MHealth);
    const auto contents = text::read_file(file);
    const auto lines = lines_of(contents);
    std::vector<Row> rows;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto fields = text::split_ws(lines[ln]);
        if (fields.empty()) continue;
        if (fields.size() < 24) {
            throw Error(ErrorKind::MissingColumns,
                        file.string() + ":" + std::to_string(ln + 1) + ": expected 24 columns");
        }
        const auto code = text::parse_int(fields[23]);
        if (!code || !d.activities.contains(static_cast<int>(*code))) parse_error(file, ln + 1, "bad activity label");
        Row row{static_cast<double>(rows.size()) / d.sample_rate_hz, {}, static_cast<int>(*code)};
        for (int a = 0; a < 3; ++a) {
            const auto v = text::parse_double(fields[static_cast<std::size_t>(d.columns[static_cast<std::size_t>(a)])]);
            if (!v) parse_error(file, ln + 1, "non-numeric acceleration");
            row.acc[static_cast<std::size_t>(a)] = *v;
        }
        rows.push_back(row);
    }
    auto stem = file.stem().string();
    if (stem.rfind("mHealth_", 0) == 0) stem = stem.substr(8);
    return streams_from_rows(rows, d, stem, "shimmer2-right-wrist");
}

LabeledRecording parse_hmpadl_file(const fs::path& file, const std::string& activity) {
    const auto d = describe(DatasetKind::HmpAdl);
    const auto stem = file.stem().string();
    const auto parts = text::split(stem, '-');
    LabeledRecording lr;
    Recording& rec = lr.recording;
    rec.subject_id = std::string(parts.back());
    rec.device_id = "hmp-right-wrist";
    rec.sample_rate_hz = d.sample_rate_hz;
    rec.unit_scale = 1.0;
    rec.start_time_ms = hmp_start_ms(parts, file);
    const auto contents = text::read_file(file);
    const auto lines = lines_of(contents);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto fields = text::split_ws(lines[ln]);
        if (fields.empty()) continue;
        if (fields.size() < 3) {
            throw Error(ErrorKind::MissingColumns, file.string() + ":" + std::to_string(ln + 1) + ": expected 3 columns");
        }
        Vec3 acc{};
        for (int a = 0; a < 3; ++a) {
            const auto v = text::parse_int(fields[static_cast<std::size_t>(a)]);
            if (!v || *v < 0 || *v > 63) parse_error(file, ln + 1, "acceleration code outside 0..63");
            acc[static_cast<std::size_t>(a)] = -1.5 + 3.0 * static_cast<double>(*v) / 63.0;
        }
        rec.samples.push_back(acc);
    }
    lr.intervals.push_back({activity, rec.start_time_ms, static_cast<std::int64_t>(std::llround(rec.end_time_ms()))});
    return lr;
}

std::vector<LabeledRecording> load_dataset(const DatasetDescriptor& descriptor, const fs::path& root) {
    if (!fs::is_directory(root)) throw Error(ErrorKind::UnknownLayout, root.string() + " is not a directory");
    std::vector<LabeledRecording> out;
    switch (descriptor.kind) {
        case DatasetKind::Pamap2: {
            fs::path dir = fs::is_directory(root / "Protocol") ? root / "Protocol" : root;
            const auto files = sorted_entries(dir, [](const fs::directory_entry& e) {
                return e.is_regular_file() && e.path().extension() == ".dat";
            });
            for (const auto& f : files) {
                auto part = parse_pamap2_file(f);
                std::move(part.begin(), part.end(), std::back_inserter(out));
            }
            break;
        }
        case DatasetKind::MHealth: {
            const auto files = sorted_entries(root, [](const fs::directory_entry& e) {
                return e.is_regular_file() && e.path().extension() == ".log";
            });
            for (const auto& f : files) {
                auto part = parse_mhealth_file(f);
                std::move(part.begin(), part.end(), std::back_inserter(out));
            }
            break;
        }
        case DatasetKind::HmpAdl:
            out = load_hmpadl(root);
            break;
        case DatasetKind::DailySports:
            out = load_dailysports(root, descriptor);
            break;
        case DatasetKind::Canonical:
            return read_canonical(root);
    }
    if (out.empty()) {
        throw Error(ErrorKind::UnknownLayout, "no " + to_string(descriptor.kind) + " files under " + root.string());
    }
    return out;
}

void write_canonical(const std::vector<LabeledRecording>& data, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t idx = 0; idx < data.size(); ++idx) {
        const auto& rec = data[idx].recording;
        char prefix[16];
        std::snprintf(prefix, sizeof prefix, "%04zu", idx);
        const std::string stem = std::string(prefix) + "_" + sanitize(rec.subject_id) + "_" + sanitize(rec.device_id);

        std::string csv = "t_ms,ax_g,ay_g,az_g\n";
        csv.reserve(csv.size() + rec.samples.size() * 64);
        for (std::size_t i = 0; i < rec.samples.size(); ++i) {
            char t[40];
            std::snprintf(t, sizeof t, "%.3f", rec.time_of(i));
            csv += t;
            for (double v : rec.samples[i]) {
                csv += ',';
                csv += text::format_double(v * rec.unit_scale);
            }
            csv += '\n';
        }
        text::write_file_atomic(dir / (stem + ".csv"), csv);

        std::ostringstream meta;
        meta << "subject_id=" << rec.subject_id << "\n"
             << "device_id=" << rec.device_id << "\n"
             << "sample_rate_hz=" << text::format_double(rec.sample_rate_hz) << "\n"
             << "start_time_ms=" << rec.start_time_ms << "\n"
             << "samples=" << rec.samples.size() << "\n";
        text::write_file_atomic(dir / (stem + ".meta"), meta.str());

        std::string labels = "activity,start_ms,end_ms\n";
        for (const auto& iv : data[idx].intervals) {
            if (iv.activity.find_first_of(",\n") != std::string::npos) {
                throw Error(ErrorKind::SchemaMismatch, "activity name '" + iv.activity + "' contains a separator");
            }
            labels += iv.activity + "," + std::to_string(iv.start_ms) + "," + std::to_string(iv.end_ms) + "\n";
        }
        text::write_file_atomic(dir / (stem + ".labels.csv"), labels);
    }
}

std::vector<LabeledRecording> read_canonical(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, dir.string() + " is not a directory");
    const auto metas = sorted_entries(dir, [](const fs::directory_entry& e) {
        return e.is_regular_file() && e.path().extension() == ".meta";
    });
    std::vector<LabeledRecording> out;
    for (const auto& meta_path : metas) {
        LabeledRecording lr;
        Recording& rec = lr.recording;
        rec.unit_scale = 1.0;
        std::optional<std::size_t> expected;
        bool have_rate = false;
        bool have_start = false;
        const auto meta_text = text::read_file(meta_path);
        for (auto line : lines_of(meta_text)) {
            line = text::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw Error(ErrorKind::SchemaMismatch, meta_path.string() + ": bad line");
            const auto key = line.substr(0, eq);
            const auto value = line.substr(eq + 1);
            if (key == "subject_id") {
                rec.subject_id = std::string(value);
            } else if (key == "device_id") {
                rec.device_id = std::string(value);
            } else if (key == "sample_rate_hz") {
                const auto v = text::parse_double(value);
                if (!v || !(*v > 0)) throw Error(ErrorKind::SchemaMismatch, meta_path.string() + ": bad sample_rate_hz");
                rec.sample_rate_hz = *v;
                have_rate = true;
            } else if (key == "start_time_ms") {
                const auto v = text::parse_int(value);
                if (!v) throw Error(ErrorKind::SchemaMismatch, meta_path.string() + ": bad start_time_ms");
                rec.start_time_ms = *v;
                have_start = true;
            } else if (key == "samples") {
                const auto v = text::parse_int(value);
                if (!v || *v < 0) throw Error(ErrorKind::SchemaMismatch, meta_path.string() + ": bad samples");
                expected = static_cast<std::size_t>(*v);
            }
        }
        if (!have_rate || rec.subject_id.empty()) {
            throw Error(ErrorKind::SchemaMismatch, meta_path.string() + ": missing subject_id or sample_rate_hz");
        }

        auto csv_path = meta_path;
        csv_path.replace_extension(".csv");
        const auto csv = text::read_file(csv_path);
        const auto lines = lines_of(csv);
        if (lines.empty() || text::trim(lines[0]) != "t_ms,ax_g,ay_g,az_g") {
            throw Error(ErrorKind::SchemaMismatch, csv_path.string() + ": expected header t_ms,ax_g,ay_g,az_g");
        }
        rec.samples.reserve(lines.size() - 1);
        for (std::size_t ln = 1; ln < lines.size(); ++ln) {
            const auto fields = text::split(lines[ln], ',');
            if (fields.size() != 4) throw Error(ErrorKind::SchemaMismatch, csv_path.string() + ":" + std::to_string(ln + 1));
            Vec3 v{};
            for (int a = 0; a < 3; ++a) {
                const auto x = text::parse_double(fields[static_cast<std::size_t>(a + 1)]);
                if (!x) parse_error(csv_path, ln + 1, "non-numeric acceleration");
                v[static_cast<std::size_t>(a)] = *x;
            }
            if (ln == 1 && !have_start) {
                const auto t = text::parse_double(fields[0]);
                if (!t) parse_error(csv_path, ln + 1, "bad t_ms");
                rec.start_time_ms = std::llround(*t);
            }
            rec.samples.push_back(v);
        }
        if (expected && *expected != rec.samples.size()) {
            throw Error(ErrorKind::SchemaMismatch, csv_path.string() + ": sample count differs from metadata");
        }

        auto labels_path = meta_path;
        labels_path.replace_extension(".labels.csv");
        if (fs::exists(labels_path)) {
            const auto labels = text::read_file(labels_path);
            const auto llines = lines_of(labels);
            if (llines.empty() || text::trim(llines[0]) != "activity,start_ms,end_ms") {
                throw Error(ErrorKind::SchemaMismatch, labels_path.string() + ": expected header activity,start_ms,end_ms");
            }
            for (std::size_t ln = 1; ln < llines.size(); ++ln) {
                const auto fields = text::split(llines[ln], ',');
                if (fields.size() != 3) throw Error(ErrorKind::SchemaMismatch, labels_path.string() + ":" + std::to_string(ln + 1));
                const auto s = text::parse_int(fields[1]);
                const auto e = text::parse_int(fields[2]);
                if (!s || !e || *s >= *e) parse_error(labels_path, ln + 1, "bad interval bounds");
                lr.intervals.push_back({std::string(text::trim(fields[0])), *s, *e});
            }
        }
        out.push_back(std::move(lr));
    }
    return out;
}

}  // namespace cadence

namespace cadence {

std::vector<Window> dataset_windows(const std::vector<LabeledRecording>& data, const ResampleOptions& options) {
    std::vector<Window> out;
    for (const auto& lr : data) {
        if (lr.recording.samples.size() < 2) continue;
        const auto rec = normalize_and_resample(lr.recording, options);
        auto windows = split_windows(rec);
        assign_labels(windows, lr.intervals);
        out.insert(out.end(), std::make_move_iterator(windows.begin()), std::make_move_iterator(windows.end()));
    }
    return out;
}

}  // namespace cadence
