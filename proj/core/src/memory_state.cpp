#include "strata/memory_state.hpp"

#include "strata/error.hpp"

#include <set>

namespace strata {

MemoryState MemoryState::empty(std::string user_id, const Config& config) {
    MemoryState state{
        std::move(user_id),
        IdSequence{},
        0,
        ShortTermMemory(config.stm_capacity),
        MidTermMemory(config.mtm_segment_capacity),
        PersonaStore{},
    };
    state.persona.user_kb = FactQueue(config.kb_capacity);
    state.persona.agent_traits = FactQueue(config.agent_traits_capacity);
    return state;
}

std::vector<std::string> invariant_violations(const MemoryState& state, const Config* config) {
    std::vector<std::string> out;
    std::set<std::uint64_t> seen_ids;
    std::size_t dim = config ? config->embedding_dim : 0;
    auto check_dim = [&](const Embedding& e, const std::string& what) {
        if (e.empty()) return;
        if (dim == 0) dim = e.size();
        if (e.size() != dim) {
            out.push_back(what + ": embedding dimension " + std::to_string(e.size()) + " != " + std::to_string(dim));
        }
    };
    auto check_id = [&](std::uint64_t id, const std::string& what) {
        if (id == 0) out.push_back(what + ": unassigned id");
        if (id >= state.ids.peek()) out.push_back(what + ": id " + std::to_string(id) + " not below next_id");
    };
    auto check_page = [&](const DialoguePage& page, const std::string& where) {
        const std::string what = where + " page " + std::to_string(page.id.value);
        check_id(page.id.value, what);
        if (!seen_ids.insert(page.id.value).second) out.push_back(what + ": duplicate page id");
        if (page.query.empty()) out.push_back(what + ": empty query");
        if (page.timestamp < 0) out.push_back(what + ": negative timestamp");
        if (page.timestamp > state.clock) out.push_back(what + ": timestamp ahead of memory clock");
        if (page.has_chain() && page.chain_meta.empty()) out.push_back(what + ": chain_meta empty");
        check_dim(page.embedding, what);
    };

    // stm
    const auto& stm = state.stm.pages();
    if (stm.size() > state.stm.capacity()) out.push_back("stm: queue exceeds capacity");
    std::set<std::uint64_t> closed_chains;
    for (std::size_t i = 0; i < stm.size(); ++i) {
        check_page(stm[i], "stm");
        if (!stm[i].has_chain()) out.push_back("stm page " + std::to_string(stm[i].id.value) + ": no chain");
        if (i > 0 && !(stm[i - 1].id < stm[i].id)) out.push_back("stm: pages out of insertion order");
        if (i > 0 && stm[i - 1].chain_id != stm[i].chain_id) {
            closed_chains.insert(stm[i - 1].chain_id.value);
            if (closed_chains.contains(stm[i].chain_id.value)) {
                out.push_back("stm: chain " + std::to_string(stm[i].chain_id.value) + " is not contiguous");
            }
        }
    }

    // mtm
    if (state.mtm.size() > state.mtm.capacity()) out.push_back("mtm: segment count exceeds capacity");
    for (const auto& [id, segment] : state.mtm.segments()) {
        const std::string what = "mtm segment " + std::to_string(id.value);
        check_id(id.value, what);
        if (segment.id != id) out.push_back(what + ": key/id mismatch");
        if (segment.pages.empty()) out.push_back(what + ": no pages");
        if (segment.l_interaction > segment.pages.size()) out.push_back(what + ": l_interaction above page count");
        if (segment.last_access < 0 || segment.last_access > state.clock) {
            out.push_back(what + ": last_access outside [0, clock]");
        }
        if (segment.embedding.empty()) out.push_back(what + ": missing embedding");
        check_dim(segment.embedding, what);
        for (const auto& page : segment.pages) {
            check_page(page, what);
            if (page.embedding.empty()) out.push_back(what + " page " + std::to_string(page.id.value) + ": missing embedding");
        }
    }

    // lpm
    auto check_queue = [&](const FactQueue& queue, const std::string& what) {
        if (queue.size() > queue.capacity()) out.push_back(what + ": exceeds capacity");
        for (const auto& fact : queue.entries()) {
            if (fact.text.empty()) out.push_back(what + ": empty fact text");
            check_dim(fact.embedding, what);
            if (fact.embedding.empty()) out.push_back(what + ": fact without embedding");
        }
    };
    check_queue(state.persona.user_kb, "lpm user_kb");
    check_queue(state.persona.agent_traits, "lpm agent_traits");
    if (config) {
        for (const auto& [dimension, trait] : state.persona.user_traits) {
            if (!config->trait_schema.contains(dimension)) {
                out.push_back("lpm user_traits: dimension '" + dimension + "' not in schema");
            }
        }
    }
    for (const auto& [dimension, trait] : state.persona.user_traits) {
        if (!(trait.confidence >= 0.0 && trait.confidence <= 1.0)) {
            out.push_back("lpm user_traits: confidence of '" + dimension + "' outside [0, 1]");
        }
    }
    return out;
}

void check_invariants(const MemoryState& state, const Config* config) {
    auto violations = invariant_violations(state, config);
    if (!violations.empty()) throw Error(ErrorCode::corruption, "invariant violated: " + violations.front());
}

} // namespace strata
