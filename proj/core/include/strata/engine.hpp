#pragma once

#include "strata/config.hpp"
#include "strata/memory_state.hpp"
#include "strata/prompt.hpp"
#include "strata/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace strata {

class Provider;

// What one exchange did to the memory tiers.
struct UpdateReport {
    PageId page_id;
    std::optional<PageId> stm_overflow;
    std::optional<SegmentId> mtm_segment;   // segment that received the overflow page
    bool created_segment = false;
    std::vector<Segment> evicted;           // removed from MTM, for archiving
    std::vector<SegmentId> promoted;        // segments whose l_interaction was reset
    std::size_t promotion_failures = 0;
    bool degraded_chain = false;
};

struct RespondResult {
    std::string response;
    RetrievalBundle bundle;
    std::string prompt;
    UpdateReport update;
};

// Binds a validated config, a provider and a prompt template, and runs the
// read path (retrieve) and the write path (exchange + update cascade) on a
// MemoryState. Every mutating call is all-or-nothing: a provider failure that
// is not absorbed by a degraded mode leaves the state exactly as it was.
class Engine {
public:
    Engine(Config config, Provider& provider, PromptTemplate prompt_template = PromptTemplate::builtin());

    const Config& config() const noexcept { return config_; }
    Provider& provider() const noexcept { return provider_; }
    const PromptTemplate& prompt_template() const noexcept { return template_; }

    MemoryState new_memory(std::string user_id) const;

    // Retrieval with N_visit/recency updates on contributing segments.
    RetrievalBundle retrieve(MemoryState& state, std::string_view query, Timestamp now) const;

    // Retrieval without any state change.
    RetrievalBundle peek(const MemoryState& state, std::string_view query) const;

    // retrieve -> assemble prompt -> complete, then record the exchange.
    RespondResult respond(MemoryState& state, std::string_view query, Timestamp now) const;

    // Records an existing query/response pair without generating anything.
    UpdateReport ingest(MemoryState& state, std::string query, std::string response, Timestamp now) const;

private:
    // STM append, STM->MTM overflow, MTM eviction, MTM->LPM promotion.
    UpdateReport apply_exchange(MemoryState& state, std::string query, std::string response, Timestamp now) const;
    void check_clock(const MemoryState& state, Timestamp now) const;

    Config config_;
    Provider& provider_;
    PromptTemplate template_;
};

// Pages added to a segment since its last promotion (its last l_interaction
// pages); this is what a promotion extracts from.
Segment unpromoted_view(const Segment& segment);

} // namespace strata
