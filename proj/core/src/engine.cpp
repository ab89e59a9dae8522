#include "strata/engine.hpp"

#include "strata/error.hpp"
#include "strata/lpm.hpp"
#include "strata/provider.hpp"
#include "strata/retrieval.hpp"

#include <spdlog/spdlog.h>

namespace strata {

Segment unpromoted_view(const Segment& segment) {
    Segment view = segment;
    const std::size_t fresh = std::min<std::size_t>(segment.l_interaction, segment.pages.size());
    view.pages.erase(view.pages.begin(), view.pages.end() - static_cast<std::ptrdiff_t>(fresh));
    return view;
}

Engine::Engine(Config config, Provider& provider, PromptTemplate prompt_template)
    : config_(std::move(config)), provider_(provider), template_(std::move(prompt_template)) {
    if (provider_.dimension() != config_.embedding_dim) {
        throw ValidationError("embedding_dim", "provider " + std::string(provider_.name()) + " produces dimension " +
                                                   std::to_string(provider_.dimension()));
    }
}

MemoryState Engine::new_memory(std::string user_id) const {
    return MemoryState::empty(std::move(user_id), config_);
}

void Engine::check_clock(const MemoryState& state, Timestamp now) const {
    if (now < 0) throw_invalid_argument("timestamp must be >= 0");
    if (now < state.clock) {
        throw_invalid_argument("timestamp " + std::to_string(now) + " precedes memory clock " +
                               std::to_string(state.clock));
    }
}

RetrievalBundle Engine::retrieve(MemoryState& state, std::string_view query, Timestamp now) const {
    check_clock(state, now);
    return strata::retrieve(state, query, config_, provider_, now, true);
}

RetrievalBundle Engine::peek(const MemoryState& state, std::string_view query) const {
    return collect(state, query, config_, provider_);
}

RespondResult Engine::respond(MemoryState& state, std::string_view query, Timestamp now) const {
    if (query.empty()) throw_invalid_argument("query must not be empty");
    check_clock(state, now);

    MemoryState work = state;
    RespondResult result;
    result.bundle = strata::retrieve(work, query, config_, provider_, now, true);
    result.prompt = assemble_prompt(result.bundle, query, template_);
    result.response = provider_.complete(result.prompt);
    result.update = apply_exchange(work, std::string(query), result.response, now);
    state = std::move(work);
    return result;
}

UpdateReport Engine::ingest(MemoryState& state, std::string query, std::string response, Timestamp now) const {
    if (query.empty()) throw_invalid_argument("query must not be empty");
    check_clock(state, now);
    MemoryState work = state;
    UpdateReport report = apply_exchange(work, std::move(query), std::move(response), now);
    state = std::move(work);
    return report;
}

UpdateReport Engine::apply_exchange(MemoryState& state, std::string query, std::string response,
                                    Timestamp now) const {
    UpdateReport report;
    state.clock = std::max(state.clock, now);
    DialoguePage page = new_page(state.ids, std::move(query), std::move(response), now);
    report.page_id = page.id;

    StmAppendResult appended = state.stm.append(std::move(page), provider_, state.ids);
    report.degraded_chain = appended.degraded;

    if (appended.overflow) {
        report.stm_overflow = appended.overflow->id;
        MtmInsertResult inserted = state.mtm.insert_page(std::move(*appended.overflow), config_.theta,
                                                         config_.heat, provider_, state.ids, now);
        report.mtm_segment = inserted.segment_id;
        report.created_segment = inserted.created;
        if (inserted.evicted) report.evicted.push_back(std::move(*inserted.evicted));
    }

    // Only segments that gained pages since their last promotion are promoted;
    // otherwise a segment kept hot by visits alone would be re-promoted on
    // every exchange.
    for (const Segment& hot : state.mtm.hot_segments(config_.heat_tau, config_.heat, now)) {
        if (hot.l_interaction == 0) continue;
        try {
            promote(state.persona, unpromoted_view(hot), config_.trait_schema, provider_, now);
        } catch (const ProviderUnavailable& e) {
            spdlog::warn("promotion of segment {} failed, persona unchanged: {}", hot.id.value, e.what());
            ++report.promotion_failures;
        }
        state.mtm.reset_after_promotion(hot.id);
        report.promoted.push_back(hot.id);
    }
    return report;
}

} // namespace strata
