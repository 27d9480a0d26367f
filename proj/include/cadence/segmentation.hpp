#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cadence/probe.hpp"
#include "cadence/signal.hpp"

namespace cadence {

inline constexpr int kBlockWindows = 180;           // 30 minutes of 10 s windows
inline constexpr int kMinSegmentWindows = 3;        // 30 s
inline constexpr int kMaxNeighborhoodWindows = 30;  // 5 minutes
inline constexpr int kMinTailBlockWindows = 6;

// Cosine similarities of up to 180 embeddings with inclusive prefix sums of S
// and S^2, so any rectangle sum costs four lookups.
class SimilarityBlock {
public:
    // Throws ZeroVector(index) for an all-zero (or non-finite) embedding.
    explicit SimilarityBlock(std::span<const std::vector<float>> embeddings);

    int size() const { return size_; }
    double similarity(int i, int j) const { return sim_[index(i, j)]; }

    // Sum over rows [r0, r1) x columns [c0, c1).
    double rect_sum(int r0, int r1, int c0, int c1) const;
    double rect_sum_sq(int r0, int r1, int c0, int c1) const;

    struct PairStats {
        double mean = 0.0;
        double stddev = 0.0;   // population
        std::int64_t pairs = 0;
    };
    // Statistics of the C(n,2) unordered distinct pairs inside [begin, end).
    PairStats pair_stats(int begin, int end) const;

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(j); }
    std::size_t pindex(int i, int j) const { return static_cast<std::size_t>(i) * static_cast<std::size_t>(size_ + 1) + static_cast<std::size_t>(j); }

    int size_ = 0;
    std::vector<double> sim_;
    std::vector<double> prefix_;
    std::vector<double> prefix_sq_;
};

// Half-open window range [start, end) with its neighbourhood extents, already
// clipped at the block edges.
struct SegmentProposal {
    int start = 0;
    int end = 0;
    int before = 0;
    int after = 0;
    double salience = 0.0;

    int length() const { return end - start; }
};

// Neighbourhood per side = min(floor(length / 2), 30) windows, clipped.
SegmentProposal make_proposal(int start, int end, int block_size);

// Mean(sim(seg)) - Mean(sim(seg + nb)) - 2 * Stdev(sim(seg)); the union of a
// segment and its neighbourhood is itself contiguous.
double salience(const SimilarityBlock& block, const SegmentProposal& proposal);

struct ProposalStats {
    std::int64_t enumerated = 0;     // boundary pairs i < j
    std::int64_t long_enough = 0;    // after the 3-window minimum
    std::int64_t accepted = 0;       // salience > 0
};

// Boundary pairs i < j over window indices give proposals [i, j + 1); this is
// W(W-1)/2 candidates (16,110 for a full block).
std::int64_t boundary_pair_count(int block_size);

std::vector<SegmentProposal> propose_segments(const SimilarityBlock& block, ProposalStats* stats = nullptr);

struct IndexSegment {
    int start = 0;
    int end = 0;
    double salience = 0.0;

    int length() const { return end - start; }
};

// Descending salience. A candidate overlapping a survivor by more than half
// of the shorter interval is merged into it (union, survivor keeps its
// higher salience); smaller overlaps are cut away from the candidate.
// Candidates shorter than 3 windows after cutting are dropped. Output is
// disjoint and sorted by start.
std::vector<IndexSegment> suppress_overlaps(std::vector<SegmentProposal> proposals);

struct SalientSegment {
    std::string subject_id;
    std::int64_t start_time_ms = 0;
    std::int64_t end_time_ms = 0;
    double salience = 0.0;
};

// Per subject (in first-appearance order, windows sorted by time): consecutive
// 180-window blocks, the last processed only if it has >= 6 windows.
std::vector<SalientSegment> segment_timeseries(const EmbeddingSeries& series, int threads = 1);

std::string segments_csv(const std::vector<SalientSegment>& segments);
std::vector<SalientSegment> parse_segments_csv(const std::string& contents);

}  // namespace cadence
