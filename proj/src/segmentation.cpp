#include "cadence/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "cadence/error.hpp"
#include "cadence/parallel.hpp"
#include "cadence/text.hpp"

namespace cadence {

namespace {

// Prefix-sum accumulation leaves ~1e-15 noise on salience values that are
// exactly zero in exact arithmetic (e.g. a constant stream).
constexpr double kSalienceFloor = 1e-12;

int overlap(int a0, int a1, int b0, int b1) { return std::max(0, std::min(a1, b1) - std::max(a0, b0)); }

}  // namespace

SimilarityBlock::SimilarityBlock(std::span<const std::vector<float>> embeddings)
    : size_(static_cast<int>(embeddings.size())) {
    const auto n = static_cast<std::size_t>(size_);
    std::vector<std::vector<double>> unit(n);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (float v : embeddings[i]) norm += static_cast<double>(v) * static_cast<double>(v);
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorKind::ZeroVector, "embedding " + std::to_string(i));
        if (embeddings[i].size() != embeddings[0].size()) throw Error(ErrorKind::ShapeMismatch, "embedding dimensions differ");
        unit[i].resize(embeddings[i].size());
        for (std::size_t k = 0; k < embeddings[i].size(); ++k) unit[i][k] = static_cast<double>(embeddings[i][k]) / norm;
    }
    sim_.assign(n * n, 0.0);
    for (int i = 0; i < size_; ++i) {
        sim_[index(i, i)] = 1.0;
        for (int j = i + 1; j < size_; ++j) {
            double dot = 0.0;
            const auto& a = unit[static_cast<std::size_t>(i)];
            const auto& b = unit[static_cast<std::size_t>(j)];
            for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
            dot = std::clamp(dot, -1.0, 1.0);
            sim_[index(i, j)] = dot;
            sim_[index(j, i)] = dot;
        }
    }
    prefix_.assign((n + 1) * (n + 1), 0.0);
    prefix_sq_.assign((n + 1) * (n + 1), 0.0);
    for (int i = 0; i < size_; ++i) {
        for (int j = 0; j < size_; ++j) {
            const double s = sim_[index(i, j)];
            prefix_[pindex(i + 1, j + 1)] = s + prefix_[pindex(i, j + 1)] + prefix_[pindex(i + 1, j)] - prefix_[pindex(i, j)];
            prefix_sq_[pindex(i + 1, j + 1)] =
                s * s + prefix_sq_[pindex(i, j + 1)] + prefix_sq_[pindex(i + 1, j)] - prefix_sq_[pindex(i, j)];
        }
    }
}

double SimilarityBlock::rect_sum(int r0, int r1, int c0, int c1) const {
    return prefix_[pindex(r1, c1)] - prefix_[pindex(r0, c1)] - prefix_[pindex(r1, c0)] + prefix_[pindex(r0, c0)];
}

double SimilarityBlock::rect_sum_sq(int r0, int r1, int c0, int c1) const {
    return prefix_sq_[pindex(r1, c1)] - prefix_sq_[pindex(r0, c1)] - prefix_sq_[pindex(r1, c0)] + prefix_sq_[pindex(r0, c0)];
}

SimilarityBlock::PairStats SimilarityBlock::pair_stats(int begin, int end) const {
    if (begin < 0 || end > size_ || begin > end) throw Error(ErrorKind::OutOfBounds, "range outside block");
    const std::int64_t n = end - begin;
    PairStats st;
    st.pairs = n * (n - 1) / 2;
    if (st.pairs == 0) return st;
    // Diagonal entries are exactly 1, so removing them subtracts n from both sums.
    const double sum = (rect_sum(begin, end, begin, end) - static_cast<double>(n)) / 2.0;
    const double sum_sq = (rect_sum_sq(begin, end, begin, end) - static_cast<double>(n)) / 2.0;
    const double count = static_cast<double>(st.pairs);
    st.mean = sum / count;
    if (st.pairs > 1) st.stddev = std::sqrt(std::max(0.0, sum_sq / count - st.mean * st.mean));
    return st;
}

SegmentProposal make_proposal(int start, int end, int block_size) {
    if (start < 0 || end > block_size || start >= end) throw Error(ErrorKind::OutOfBounds, "proposal outside block");
    const int nb = std::min((end - start) / 2, kMaxNeighborhoodWindows);
    SegmentProposal p;
    p.start = start;
    p.end = end;
    p.before = std::min(nb, start);
    p.after = std::min(nb, block_size - end);
    return p;
}

double salience(const SimilarityBlock& block, const SegmentProposal& p) {
    if (p.start < 0 || p.end > block.size() || p.start >= p.end || p.before < 0 || p.after < 0 ||
        p.start - p.before < 0 || p.end + p.after > block.size()) {
        throw Error(ErrorKind::OutOfBounds, "proposal or neighbourhood outside block");
    }
    const auto inside = block.pair_stats(p.start, p.end);
    const auto with_nb = block.pair_stats(p.start - p.before, p.end + p.after);
    return inside.mean - with_nb.mean - 2.0 * inside.stddev;
}

std::int64_t boundary_pair_count(int block_size) {
    const std::int64_t w = block_size;
    return w * (w - 1) / 2;
}

std::vector<SegmentProposal> propose_segments(const SimilarityBlock& block, ProposalStats* stats) {
    ProposalStats st;
    std::vector<SegmentProposal> out;
    const int w = block.size();
    for (int i = 0; i < w; ++i) {
        for (int j = i + 1; j < w; ++j) {
            ++st.enumerated;
            const int end = j + 1;
            if (end - i < kMinSegmentWindows) continue;
            ++st.long_enough;
            auto p = make_proposal(i, end, w);
            p.salience = salience(block, p);
            if (p.salience > kSalienceFloor) out.push_back(p);
        }
    }
    st.accepted = static_cast<std::int64_t>(out.size());
    if (stats) *stats = st;
    return out;
}

std::vector<IndexSegment> suppress_overlaps(std::vector<SegmentProposal> proposals) {
    std::sort(proposals.begin(), proposals.end(), [](const SegmentProposal& a, const SegmentProposal& b) {
        if (a.salience != b.salience) return a.salience > b.salience;
        if (a.start != b.start) return a.start < b.start;
        return a.end < b.end;
    });
    std::vector<IndexSegment> kept;
    for (const auto& c : proposals) {
        int target = -1;
        double best = 0.5;
        for (std::size_t s = 0; s < kept.size(); ++s) {
            const int ov = overlap(c.start, c.end, kept[s].start, kept[s].end);
            if (ov == 0) continue;
            const double frac = static_cast<double>(ov) / std::min(c.length(), kept[s].length());
            if (frac > best) {
                best = frac;
                target = static_cast<int>(s);
            }
        }
        int start = c.start;
        int end = c.end;
        for (std::size_t s = 0; s < kept.size() && start < end; ++s) {
            if (static_cast<int>(s) == target) continue;
            const auto& k = kept[s];
            if (overlap(start, end, k.start, k.end) == 0) continue;
            if (k.start <= start) {
                start = std::min(end, k.end);
            } else if (k.end >= end) {
                end = std::max(start, k.start);
            } else {
                // Survivor strictly inside: keep the side holding the merge
                // target, otherwise the longer side.
                const bool keep_left = target >= 0 ? kept[static_cast<std::size_t>(target)].end <= k.start
                                                   : (k.start - start) >= (end - k.end);
                if (keep_left) {
                    end = k.start;
                } else {
                    start = k.end;
                }
            }
        }
        if (start >= end) continue;
        if (target >= 0) {
            auto& t = kept[static_cast<std::size_t>(target)];
            if (overlap(start, end, t.start, t.end) > 0) {
                t.start = std::min(t.start, start);
                t.end = std::max(t.end, end);
            }
        } else if (end - start >= kMinSegmentWindows) {
            kept.push_back({start, end, c.salience});
        }
    }
    std::sort(kept.begin(), kept.end(), [](const IndexSegment& a, const IndexSegment& b) { return a.start < b.start; });
    return kept;
}

std::vector<SalientSegment> segment_timeseries(const EmbeddingSeries& series, int threads) {
    std::vector<std::string> subjects;
    std::map<std::string, std::vector<const EmbeddingRecord*>> by_subject;
    for (const auto& r : series) {
        auto& group = by_subject[r.subject_id];
        if (group.empty()) subjects.push_back(r.subject_id);
        group.push_back(&r);
    }
    struct Block {
        const std::vector<const EmbeddingRecord*>* records;
        std::size_t begin;
        std::size_t end;
    };
    std::vector<Block> blocks;
    for (const auto& s : subjects) {
        auto& group = by_subject[s];
        std::stable_sort(group.begin(), group.end(),
                         [](const EmbeddingRecord* a, const EmbeddingRecord* b) { return a->start_time_ms < b->start_time_ms; });
        for (std::size_t begin = 0; begin < group.size(); begin += kBlockWindows) {
            const std::size_t end = std::min(group.size(), begin + kBlockWindows);
            if (end - begin < static_cast<std::size_t>(kBlockWindows) && end - begin < static_cast<std::size_t>(kMinTailBlockWindows)) {
                continue;
            }
            blocks.push_back({&group, begin, end});
        }
    }
    std::vector<std::vector<SalientSegment>> results(blocks.size());
    parallel_for(blocks.size(), threads, [&](std::size_t b) {
        const auto& blk = blocks[b];
        std::vector<std::vector<float>> vectors;
        for (std::size_t i = blk.begin; i < blk.end; ++i) vectors.push_back((*blk.records)[i]->vector);
        const SimilarityBlock sim(vectors);
        for (const auto& seg : suppress_overlaps(propose_segments(sim))) {
            const auto* first = (*blk.records)[blk.begin + static_cast<std::size_t>(seg.start)];
            const auto* last = (*blk.records)[blk.begin + static_cast<std::size_t>(seg.end) - 1];
            results[b].push_back({first->subject_id, first->start_time_ms, last->start_time_ms + kWindowMs, seg.salience});
        }
    });
    std::vector<SalientSegment> out;
    for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
    return out;
}

std::string segments_csv(const std::vector<SalientSegment>& segments) {
    std::ostringstream out;
    out << "subject_id,start_ms,end_ms,salience\n";
    for (const auto& s : segments) {
        out << s.subject_id << "," << s.start_time_ms << "," << s.end_time_ms << "," << text::format_double(s.salience) << "\n";
    }
    return out.str();
}

std::vector<SalientSegment> parse_segments_csv(const std::string& contents) {
    auto lines = text::split(contents, '\n');
    if (lines.empty() || text::trim(lines[0]) != "subject_id,start_ms,end_ms,salience") {
        throw Error(ErrorKind::SchemaMismatch, "segments file must start with subject_id,start_ms,end_ms,salience");
    }
    std::vector<SalientSegment> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line = text::trim(lines[i]);
        if (line.empty()) continue;
        const auto f = text::split(line, ',');
        const auto where = "segments line " + std::to_string(i + 1);
        if (f.size() != 4) throw Error(ErrorKind::RecordParse, where);
        const auto s = text::parse_int(f[1]);
        const auto e = text::parse_int(f[2]);
        const auto sal = text::parse_double(f[3]);
        if (!s || !e || !sal || *s >= *e) throw Error(ErrorKind::RecordParse, where);
        out.push_back({std::string(f[0]), *s, *e, *sal});
    }
    return out;
}

}  // namespace cadence
