#include "strata/lpm.hpp"

#include "strata/error.hpp"
#include "strata/provider.hpp"

#include <algorithm>
#include <numeric>

namespace strata {

PromotionResult promote(PersonaStore& persona, const Segment& segment, const TraitSchema& schema,
                        Provider& provider, Timestamp now) {
    if (segment.pages.empty()) throw_invalid_argument("cannot promote an empty segment");

    const PersonaUpdates updates = provider.extract_persona_updates(segment, schema);
    auto embed_all = [&](const std::vector<std::string>& facts) {
        std::vector<FactEntry> entries;
        entries.reserve(facts.size());
        for (const auto& fact : facts) {
            entries.push_back(FactEntry{fact, provider.embed(fact), segment.id, now});
        }
        return entries;
    };
    std::vector<FactEntry> user_entries = embed_all(updates.user_facts);
    std::vector<FactEntry> agent_entries = embed_all(updates.agent_facts);

    PromotionResult result;
    for (auto& entry : user_entries) {
        if (persona.user_kb.push(std::move(entry))) ++result.facts_evicted;
        ++result.user_facts_added;
    }
    for (auto& entry : agent_entries) {
        if (persona.agent_traits.push(std::move(entry))) ++result.facts_evicted;
        ++result.agent_facts_added;
    }
    for (const auto& [dimension, update] : updates.user_traits) {
        // Provider already filtered against the schema; keep the closure here too.
        if (!schema.contains(dimension)) continue;
        persona.user_traits[dimension] = TraitValue{update.value, update.confidence, now};
        ++result.traits_updated;
    }
    return result;
}

std::vector<ScoredFact> top_facts(const FactQueue& queue, std::span<const double> query_embedding,
                                  std::size_t top_n) {
    const auto& entries = queue.entries();
    std::vector<std::size_t> order(entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> scores(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) scores[i] = cosine(entries[i].embedding, query_embedding);

    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        if (entries[a].created_at != entries[b].created_at) return entries[a].created_at > entries[b].created_at;
        return a > b;  // later in the queue is newer
    });
    order.resize(std::min(order.size(), top_n));

    std::vector<ScoredFact> hits;
    hits.reserve(order.size());
    for (std::size_t i : order) hits.push_back(ScoredFact{entries[i], scores[i]});
    return hits;
}

PersonaHits retrieve_persona(const PersonaStore& persona, std::span<const double> query_embedding,
                             std::size_t top_n) {
    if (top_n == 0) throw_invalid_argument("top_n must be >= 1");
    PersonaHits hits;
    hits.user_kb_hits = top_facts(persona.user_kb, query_embedding, top_n);
    hits.agent_trait_hits = top_facts(persona.agent_traits, query_embedding, top_n);
    hits.user_profile = persona.user_profile;
    hits.user_traits = persona.user_traits;
    hits.agent_profile = persona.agent_profile;
    return hits;
}

} // namespace strata
