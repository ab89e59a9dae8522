#pragma once

#include "strata/config.hpp"
#include "strata/memory_state.hpp"
#include "strata/types.hpp"

#include <string_view>
#include <vector>

namespace strata {

class Provider;

// Segment chosen in the first retrieval stage.
struct SegmentMatch {
    SegmentId id;
    double score = 0.0;
};

// Stage 1: every segment scored with f_score against the query page, best
// top_m kept. Ties: more recent last_access, then smaller id.
std::vector<SegmentMatch> rank_segments(const MidTermMemory& mtm, const DialoguePage& query_page,
                                        std::size_t top_m);

// Stage 2: pages of the chosen segments pooled and ranked by cosine to the
// query embedding, best top_k kept. Ties: newer timestamp, then smaller id.
std::vector<ScoredPage> rank_pages(const MidTermMemory& mtm, const std::vector<SegmentMatch>& segments,
                                   std::span<const double> query_embedding, std::size_t top_k);

// Gathers STM pages, two-stage MTM hits and persona hits without touching any
// counters.
RetrievalBundle collect(const MemoryState& state, std::string_view query, const Config& config,
                        Provider& provider);

// collect() followed, when touch is set, by one touch per segment that
// contributed at least one page. On provider failure the state is unchanged.
RetrievalBundle retrieve(MemoryState& state, std::string_view query, const Config& config, Provider& provider,
                         Timestamp now, bool touch = true);

} // namespace strata
