#include "cadence/evaluation.hpp"

#include <map>
#include <set>
#include <sstream>

#include "cadence/error.hpp"
#include "cadence/text.hpp"

namespace cadence {

namespace {

using Span = std::pair<std::int64_t, std::int64_t>;

bool same_subject(const TruthInterval& t, const std::string& subject) {
    return t.subject_id.empty() || t.subject_id == subject;
}

std::int64_t union_length(std::vector<Span> spans) {
    std::sort(spans.begin(), spans.end());
    std::int64_t total = 0;
    std::int64_t cur_start = 0;
    std::int64_t cur_end = 0;
    bool open = false;
    for (const auto& [s, e] : spans) {
        if (s >= e) continue;
        if (!open || s > cur_end) {
            if (open) total += cur_end - cur_start;
            cur_start = s;
            cur_end = e;
            open = true;
        } else {
            cur_end = std::max(cur_end, e);
        }
    }
    if (open) total += cur_end - cur_start;
    return total;
}

// Union length of each activity's labeled time inside the segment.
std::map<std::string, std::int64_t> coverage(const SalientSegment& seg, std::span<const TruthInterval> truth) {
    std::map<std::string, std::vector<Span>> clipped;
    for (const auto& t : truth) {
        if (!same_subject(t, seg.subject_id)) continue;
        const auto s = std::max(seg.start_time_ms, t.interval.start_ms);
        const auto e = std::min(seg.end_time_ms, t.interval.end_ms);
        if (s < e) clipped[t.interval.activity].push_back({s, e});
    }
    std::map<std::string, std::int64_t> out;
    for (auto& [activity, spans] : clipped) out[activity] = union_length(std::move(spans));
    return out;
}

std::optional<double> ratio(double num, double den) {
    if (den <= 0.0) return std::nullopt;
    return num / den;
}

std::int64_t length(const SalientSegment& s) { return s.end_time_ms - s.start_time_ms; }

std::int64_t overlap_with_predictions(const TruthInterval& t, std::span<const SalientSegment> predicted) {
    std::vector<Span> spans;
    for (const auto& p : predicted) {
        if (!t.subject_id.empty() && p.subject_id != t.subject_id) continue;
        const auto s = std::max(p.start_time_ms, t.interval.start_ms);
        const auto e = std::min(p.end_time_ms, t.interval.end_ms);
        if (s < e) spans.push_back({s, e});
    }
    return union_length(std::move(spans));
}

// Event and duration tallies restricted to segments attributed to `activity`
// and events of `activity` (or everything when `activity` is empty).
SegEvalRow tally(std::span<const SalientSegment> predicted, std::span<const TruthInterval> truth,
                 const std::optional<std::string>& activity) {
    SegEvalRow row;
    row.activity = activity.value_or("overall");
    std::size_t pure_segments = 0;
    double pure_duration = 0.0;
    double predicted_duration = 0.0;
    for (const auto& p : predicted) {
        if (activity && majority_activity(p, truth) != activity) continue;
        ++row.predicted_segments;
        predicted_duration += static_cast<double>(length(p));
        if (segment_is_pure(p, truth)) {
            ++pure_segments;
            pure_duration += static_cast<double>(length(p));
        }
    }
    std::size_t hit_events = 0;
    double labeled_duration = 0.0;
    double hit_duration = 0.0;
    for (const auto& t : truth) {
        if (t.interval.activity == "null") continue;
        if (activity && t.interval.activity != *activity) continue;
        ++row.labeled_events;
        const auto ov = overlap_with_predictions(t, predicted);
        if (ov > 0) ++hit_events;
        labeled_duration += static_cast<double>(t.interval.end_ms - t.interval.start_ms);
        hit_duration += static_cast<double>(ov);
    }
    row.event = {ratio(static_cast<double>(pure_segments), static_cast<double>(row.predicted_segments)),
                 ratio(static_cast<double>(hit_events), static_cast<double>(row.labeled_events))};
    row.window = {ratio(pure_duration, predicted_duration), ratio(hit_duration, labeled_duration)};
    return row;
}

std::string cell(const std::optional<double>& v) { return v ? text::format_double(*v) : "NA"; }

}  // namespace

bool segment_is_pure(const SalientSegment& segment, std::span<const TruthInterval> truth) {
    const auto cov = coverage(segment, truth);
    if (cov.size() != 1) return false;
    const auto& [activity, covered] = *cov.begin();
    return activity != "null" && covered == length(segment);
}

std::optional<std::string> majority_activity(const SalientSegment& segment, std::span<const TruthInterval> truth) {
    std::optional<std::string> best;
    std::int64_t best_len = 0;
    for (const auto& [activity, covered] : coverage(segment, truth)) {
        if (covered > best_len) {
            best_len = covered;
            best = activity;
        }
    }
    return best;
}

PrecisionRecall event_metrics(std::span<const SalientSegment> predicted, std::span<const TruthInterval> truth) {
    return tally(predicted, truth, std::nullopt).event;
}

PrecisionRecall window_metrics(std::span<const SalientSegment> predicted, std::span<const TruthInterval> truth) {
    return tally(predicted, truth, std::nullopt).window;
}

SegEvalReport evaluate_segmentation(std::span<const SalientSegment> predicted, std::span<const TruthInterval> truth) {
    SegEvalReport report;
    report.overall = tally(predicted, truth, std::nullopt);
    std::set<std::string> activities;
    for (const auto& t : truth) {
        if (t.interval.activity != "null") activities.insert(t.interval.activity);
    }
    for (const auto& a : activities) report.activities.push_back(tally(predicted, truth, a));
    return report;
}

std::string seg_eval_csv(const SegEvalReport& report) {
    std::ostringstream out;
    out << "activity,event_precision,event_recall,window_precision,window_recall\n";
    auto emit = [&](const SegEvalRow& r) {
        out << r.activity << "," << cell(r.event.precision) << "," << cell(r.event.recall) << "," << cell(r.window.precision)
            << "," << cell(r.window.recall) << "\n";
    };
    emit(report.overall);
    for (const auto& r : report.activities) emit(r);
    return out.str();
}

std::vector<TruthInterval> parse_truth_csv(const std::string& contents) {
    const auto lines = text::split(contents, '\n');
    if (lines.empty()) throw Error(ErrorKind::SchemaMismatch, "labels file is empty");
    const auto header = text::trim(lines[0]);
    bool with_subject = false;
    if (header == "subject_id,activity,start_ms,end_ms") {
        with_subject = true;
    } else if (header != "activity,start_ms,end_ms") {
        throw Error(ErrorKind::SchemaMismatch, "labels header must be [subject_id,]activity,start_ms,end_ms");
    }
    std::vector<TruthInterval> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line = text::trim(lines[i]);
        if (line.empty()) continue;
        const auto f = text::split(line, ',');
        const std::size_t off = with_subject ? 1 : 0;
        if (f.size() != 3 + off) throw Error(ErrorKind::RecordParse, "labels line " + std::to_string(i + 1));
        const auto s = text::parse_int(f[off + 1]);
        const auto e = text::parse_int(f[off + 2]);
        if (!s || !e || *s >= *e) throw Error(ErrorKind::RecordParse, "labels line " + std::to_string(i + 1));
        TruthInterval t;
        if (with_subject) t.subject_id = std::string(f[0]);
        t.interval = {std::string(f[off]), *s, *e};
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace cadence
