#pragma once

#include "strata/config.hpp"
#include "strata/ids.hpp"
#include "strata/types.hpp"

#include <map>
#include <optional>
#include <vector>

namespace strata {

class Provider;

// cosine(segment embedding, page embedding) + jaccard(segment keywords, page
// keywords). Lies in [-1, 2]. Throws invalid_argument on dimension mismatch.
double f_score(const DialoguePage& page, const Segment& segment);

// alpha * n_visit + beta * l_interaction + gamma * exp(-(now - last_access) / mu).
// Throws invalid_argument when now precedes last_access.
double heat(const Segment& segment, Timestamp now, const HeatWeights& weights);

// Eviction order: lower heat first, then older last_access, then smaller id.
bool evicts_before(const Segment& a, double heat_a, const Segment& b, double heat_b);

struct MtmInsertResult {
    SegmentId segment_id;  // segment now holding the page
    bool created = false;
    std::optional<Segment> evicted;
};

// Segmented-paging store: topic segments of pages, bounded by segment count,
// with heat-based eviction.
class MidTermMemory {
public:
    explicit MidTermMemory(std::size_t capacity = 200);

    static MidTermMemory restore(std::size_t capacity, std::vector<Segment> segments);

    // Places the page into the best-scoring segment above theta, or a new one,
    // then evicts the coldest segment if the store is over capacity. All
    // provider work happens before any mutation: on failure the store and the
    // id sequence are untouched.
    MtmInsertResult insert_page(DialoguePage page, double theta, const HeatWeights& weights,
                                Provider& provider, IdSequence& ids, Timestamp now);

    // Records a retrieval hit: n_visit + 1 and last_access = now.
    void touch(SegmentId id, Timestamp now);

    // Clears l_interaction after the segment was promoted to persona memory.
    void reset_after_promotion(SegmentId id);

    // Segments with heat strictly above tau, hottest first.
    std::vector<Segment> hot_segments(double tau, const HeatWeights& weights, Timestamp now) const;

    std::optional<SegmentId> coldest(const HeatWeights& weights, Timestamp now) const;

    const Segment* find(SegmentId id) const;
    const Segment& at(SegmentId id) const;
    const std::map<SegmentId, Segment>& segments() const noexcept { return segments_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return segments_.size(); }
    bool empty() const noexcept { return segments_.empty(); }
    std::size_t page_count() const;

    friend bool operator==(const MidTermMemory&, const MidTermMemory&) = default;

private:
    Segment& mutable_at(SegmentId id);

    std::size_t capacity_;
    std::map<SegmentId, Segment> segments_;
};

} // namespace strata
