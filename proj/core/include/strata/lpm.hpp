#pragma once

#include "strata/config.hpp"
#include "strata/types.hpp"

#include <span>
#include <vector>

namespace strata {

class Provider;

struct PromotionResult {
    std::size_t user_facts_added = 0;
    std::size_t agent_facts_added = 0;
    std::size_t traits_updated = 0;
    std::size_t facts_evicted = 0;
};

// Extracts persona updates from a hot segment and folds them in: facts are
// embedded and pushed onto the FIFO queues, trait values overwrite per
// dimension. Throws ProviderUnavailable with the persona untouched.
PromotionResult promote(PersonaStore& persona, const Segment& segment, const TraitSchema& schema,
                        Provider& provider, Timestamp now);

struct PersonaHits {
    std::vector<ScoredFact> user_kb_hits;
    std::vector<ScoredFact> agent_trait_hits;
    ProfileMap user_profile;
    TraitMap user_traits;
    ProfileMap agent_profile;
};

// Best top_n facts per queue by cosine to the query (newest first on ties)
// plus full profiles and traits. Pure read.
PersonaHits retrieve_persona(const PersonaStore& persona, std::span<const double> query_embedding,
                             std::size_t top_n);

std::vector<ScoredFact> top_facts(const FactQueue& queue, std::span<const double> query_embedding,
                                  std::size_t top_n);

} // namespace strata
