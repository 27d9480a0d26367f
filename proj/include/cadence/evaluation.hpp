#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cadence/segmentation.hpp"
#include "cadence/signal.hpp"

namespace cadence {

// A labeled interval attached to a subject. An empty subject id matches
// every subject.
struct TruthInterval {
    std::string subject_id;
    LabeledInterval interval;
};

// Undefined ratios (empty denominators) stay empty.
struct PrecisionRecall {
    std::optional<double> precision;
    std::optional<double> recall;
};

struct SegEvalRow {
    std::string activity;   // "overall" for the aggregate row
    PrecisionRecall event;
    PrecisionRecall window;
    std::size_t predicted_segments = 0;
    std::size_t labeled_events = 0;
};

struct SegEvalReport {
    SegEvalRow overall;
    std::vector<SegEvalRow> activities;   // every non-null activity present, sorted by name
};

// A segment is pure when its whole span is covered by labeled time of one
// single non-null activity.
bool segment_is_pure(const SalientSegment& segment, std::span<const TruthInterval> truth);

// Activity holding most of the segment's labeled duration (ties: smallest
// name), or nothing if the segment touches no labeled time.
std::optional<std::string> majority_activity(const SalientSegment& segment, std::span<const TruthInterval> truth);

PrecisionRecall event_metrics(std::span<const SalientSegment> predicted, std::span<const TruthInterval> truth);
PrecisionRecall window_metrics(std::span<const SalientSegment> predicted, std::span<const TruthInterval> truth);

SegEvalReport evaluate_segmentation(std::span<const SalientSegment> predicted, std::span<const TruthInterval> truth);

// activity,event_precision,event_recall,window_precision,window_recall with
// "NA" for undefined values.
std::string seg_eval_csv(const SegEvalReport& report);

// Accepts "activity,start_ms,end_ms" or "subject_id,activity,start_ms,end_ms".
std::vector<TruthInterval> parse_truth_csv(const std::string& contents);

// Keeps the records whose 10 s span lies fully inside a segment of the same
// subject. Works for Window and EmbeddingRecord.
template <class Record>
std::vector<Record> salient_filter(std::span<const Record> records, std::span<const SalientSegment> segments) {
    std::vector<Record> out;
    for (const auto& r : records) {
        const auto inside = std::any_of(segments.begin(), segments.end(), [&](const SalientSegment& s) {
            return s.subject_id == r.subject_id && s.start_time_ms <= r.start_time_ms &&
                   r.start_time_ms + kWindowMs <= s.end_time_ms;
        });
        if (inside) out.push_back(r);
    }
    return out;
}

}  // namespace cadence
