#pragma once

#include "strata/ids.hpp"
#include "strata/similarity.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace strata {

// Seconds since the epoch. Always supplied by the caller; policy code never
// reads the system clock.
using Timestamp = std::int64_t;
using Embedding = std::vector<double>;

// One query/response exchange. Chain fields are assigned by the short-term
// tier; keywords and embedding are filled when the page enters mid-term memory.
struct DialoguePage {
    PageId id;
    std::string query;
    std::string response;
    Timestamp timestamp = 0;
    ChainId chain_id;
    std::string chain_meta;
    KeywordSet keywords;
    Embedding embedding;

    bool has_chain() const noexcept { return chain_id.assigned(); }

    friend bool operator==(const DialoguePage&, const DialoguePage&) = default;
};

// Fresh page with a unique id and no chain. Throws invalid_argument on an empty
// query or a negative timestamp.
DialoguePage new_page(IdSequence& ids, std::string query, std::string response, Timestamp timestamp);

// Text handed to the provider for keyword extraction, embedding and summaries.
std::string page_text(const DialoguePage& page);

struct Segment {
    SegmentId id;
    std::vector<DialoguePage> pages;
    std::string summary;
    KeywordSet keywords;
    Embedding embedding;
    std::uint64_t n_visit = 0;
    std::uint64_t l_interaction = 0;
    Timestamp last_access = 0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct FactEntry {
    std::string text;
    Embedding embedding;
    SegmentId source_segment;
    Timestamp created_at = 0;

    friend bool operator==(const FactEntry&, const FactEntry&) = default;
};

struct TraitValue {
    std::string value;
    double confidence = 1.0;
    Timestamp last_updated = 0;

    friend bool operator==(const TraitValue&, const TraitValue&) = default;
};

// Capacity-bounded FIFO of facts, oldest first.
class FactQueue {
public:
    explicit FactQueue(std::size_t capacity = 100);

    // Appends and returns the entry evicted to stay within capacity, if any.
    std::optional<FactEntry> push(FactEntry entry);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::deque<FactEntry>& entries() const noexcept { return entries_; }

    friend bool operator==(const FactQueue&, const FactQueue&) = default;

private:
    std::size_t capacity_;
    std::deque<FactEntry> entries_;
};

using ProfileMap = std::map<std::string, std::string>;
using TraitMap = std::map<std::string, TraitValue>;

struct PersonaStore {
    ProfileMap user_profile;
    FactQueue user_kb{100};
    TraitMap user_traits;
    ProfileMap agent_profile;
    FactQueue agent_traits{100};

    friend bool operator==(const PersonaStore&, const PersonaStore&) = default;
};

struct ScoredPage {
    DialoguePage page;
    SegmentId segment_id;
    double score = 0.0;

    friend bool operator==(const ScoredPage&, const ScoredPage&) = default;
};

struct ScoredFact {
    FactEntry fact;
    double score = 0.0;

    friend bool operator==(const ScoredFact&, const ScoredFact&) = default;
};

// Everything recalled for one query across the three tiers.
struct RetrievalBundle {
    std::vector<DialoguePage> stm_pages;
    std::vector<ScoredPage> mtm_pages;       // descending relevance
    std::vector<ScoredFact> user_kb_hits;
    std::vector<ScoredFact> agent_trait_hits;
    ProfileMap user_profile;
    TraitMap user_traits;
    ProfileMap agent_profile;

    friend bool operator==(const RetrievalBundle&, const RetrievalBundle&) = default;
};

// Whitespace tokens of all recalled memory text (pages, facts, profiles,
// traits). Used for the recalled-token efficiency counter.
std::size_t recalled_tokens(const RetrievalBundle& bundle);

} // namespace strata
