#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cadence/evaluation.hpp"
#include "cadence/ingest.hpp"
#include "cadence/probe.hpp"

namespace cadence {

// Synthetic wrist recordings at 30 Hz in g. Classes share one waveform and
// differ in cadence. Sensor orientation and amplitude drift every few seconds
// inside a bout, so simple window statistics carry little class information.
// Bouts are separated by low-intensity "null" gaps.
struct SynthConfig {
    int subjects = 20;
    int classes = 3;
    double minutes_per_subject = 60.0;
    double bout_min_s = 120.0;
    double bout_max_s = 300.0;
    double gap_min_s = 20.0;
    double gap_max_s = 60.0;
    std::uint64_t seed = 0;

    void validate() const;
};

std::string synth_class_name(int k);
std::string synth_subject_id(int s);

std::vector<LabeledRecording> synth_corpus(const SynthConfig& config);

// Embedding stream with planted coherent runs (tight clusters around random
// unit centres) separated by runs of i.i.d. random vectors. Truth intervals
// name the runs "run0", "run1", ... and the gaps "null".
struct PlantedConfig {
    int segments = 5;
    int min_windows = 6;    // 60 s
    int max_windows = 12;
    int gap_min_windows = 1;
    int gap_max_windows = 2;
    int dim = 64;
    double noise_sigma = 0.01;
    std::string subject_id = "planted";
    std::uint64_t seed = 0;

    void validate() const;
};

struct PlantedStream {
    EmbeddingSeries series;
    std::vector<TruthInterval> truth;
};

PlantedStream planted_segment_stream(const PlantedConfig& config);

}  // namespace cadence
