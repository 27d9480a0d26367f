#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cadence/signal.hpp"

namespace cadence {

enum class DatasetKind { Pamap2, MHealth, HmpAdl, DailySports, Canonical };

DatasetKind parse_dataset_kind(const std::string& name);
std::string to_string(DatasetKind kind);

struct DatasetDescriptor {
    DatasetKind kind = DatasetKind::Canonical;
    double sample_rate_hz = kTargetRateHz;
    // Wrist accelerometer columns (0-based). DailySports lists the right arm
    // here; the left arm sits 9 columns later.
    std::array<int, 3> columns{0, 1, 2};
    double unit_scale = 1.0;
    std::map<int, std::string> activities;   // code -> name; code 0 is "null" where present
};

// Native layout metadata for each public benchmark.
DatasetDescriptor describe(DatasetKind kind);

struct LabeledRecording {
    Recording recording;
    std::vector<LabeledInterval> intervals;
};

// Streams are split wherever consecutive timestamps are more than two native
// sample periods apart.
std::vector<LabeledRecording> load_dataset(const DatasetDescriptor& descriptor,
                                           const std::filesystem::path& root);

// Single-file parsers, exposed for fixture tests.
std::vector<LabeledRecording> parse_pamap2_file(const std::filesystem::path& file);
std::vector<LabeledRecording> parse_mhealth_file(const std::filesystem::path& file);
LabeledRecording parse_hmpadl_file(const std::filesystem::path& file, const std::string& activity);

// Canonical layout: for each recording `<stem>.csv` (t_ms,ax_g,ay_g,az_g),
// `<stem>.meta` (key=value: subject_id, device_id, sample_rate_hz,
// start_time_ms) and `<stem>.labels.csv` (activity,start_ms,end_ms).
// Values are written in g with 17 significant digits.
void write_canonical(const std::vector<LabeledRecording>& data, const std::filesystem::path& dir);
std::vector<LabeledRecording> read_canonical(const std::filesystem::path& dir);

// Normalizes and resamples every recording, splits it into 10 s windows and
// labels them from its intervals. Recordings shorter than one window add
// nothing.
std::vector<Window> dataset_windows(const std::vector<LabeledRecording>& data, const ResampleOptions& options = {});

}  // namespace cadence
