#include "strata/retrieval.hpp"

#include "strata/error.hpp"
#include "strata/lpm.hpp"
#include "strata/mtm.hpp"
#include "strata/provider.hpp"

#include <algorithm>
#include <set>

namespace strata {

std::vector<SegmentMatch> rank_segments(const MidTermMemory& mtm, const DialoguePage& query_page,
                                        std::size_t top_m) {
    std::vector<SegmentMatch> matches;
    matches.reserve(mtm.size());
    for (const auto& [id, segment] : mtm.segments()) matches.push_back({id, f_score(query_page, segment)});
    std::sort(matches.begin(), matches.end(), [&](const SegmentMatch& a, const SegmentMatch& b) {
        if (a.score != b.score) return a.score > b.score;
        const auto la = mtm.at(a.id).last_access;
        const auto lb = mtm.at(b.id).last_access;
        if (la != lb) return la > lb;
        return a.id < b.id;
    });
    if (matches.size() > top_m) matches.resize(top_m);
    return matches;
}

std::vector<ScoredPage> rank_pages(const MidTermMemory& mtm, const std::vector<SegmentMatch>& segments,
                                   std::span<const double> query_embedding, std::size_t top_k) {
    std::vector<ScoredPage> pool;
    for (const auto& match : segments) {
        const Segment& segment = mtm.at(match.id);
        for (const auto& page : segment.pages) {
            pool.push_back(ScoredPage{page, segment.id, cosine(page.embedding, query_embedding)});
        }
    }
    std::sort(pool.begin(), pool.end(), [](const ScoredPage& a, const ScoredPage& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.page.timestamp != b.page.timestamp) return a.page.timestamp > b.page.timestamp;
        return a.page.id < b.page.id;
    });
    if (pool.size() > top_k) pool.resize(top_k);
    return pool;
}

RetrievalBundle collect(const MemoryState& state, std::string_view query, const Config& config,
                        Provider& provider) {
    if (query.empty()) throw_invalid_argument("query must not be empty");
    DialoguePage query_page;
    query_page.query = std::string(query);
    query_page.embedding = provider.embed(query);
    query_page.keywords = provider.extract_keywords(query);

    RetrievalBundle bundle;
    bundle.stm_pages = state.stm.all_pages();
    const auto segments = rank_segments(state.mtm, query_page, config.top_m_segments);
    bundle.mtm_pages = rank_pages(state.mtm, segments, query_page.embedding, config.top_k_pages);

    PersonaHits persona = retrieve_persona(state.persona, query_page.embedding, config.lpm_top_n);
    bundle.user_kb_hits = std::move(persona.user_kb_hits);
    bundle.agent_trait_hits = std::move(persona.agent_trait_hits);
    bundle.user_profile = std::move(persona.user_profile);
    bundle.user_traits = std::move(persona.user_traits);
    bundle.agent_profile = std::move(persona.agent_profile);
    return bundle;
}

RetrievalBundle retrieve(MemoryState& state, std::string_view query, const Config& config, Provider& provider,
                         Timestamp now, bool touch) {
    if (touch && now < state.clock) {
        throw_invalid_argument("timestamp " + std::to_string(now) + " precedes memory clock " +
                               std::to_string(state.clock));
    }
    RetrievalBundle bundle = collect(state, query, config, provider);
    if (!touch) return bundle;

    std::set<SegmentId> contributors;
    for (const auto& hit : bundle.mtm_pages) contributors.insert(hit.segment_id);
    for (SegmentId id : contributors) state.mtm.touch(id, now);
    state.clock = std::max(state.clock, now);
    return bundle;
}

} // namespace strata
