#include "strata/types.hpp"

#include "strata/error.hpp"
#include "strata/text.hpp"

namespace strata {

DialoguePage new_page(IdSequence& ids, std::string query, std::string response, Timestamp timestamp) {
    if (query.empty()) throw_invalid_argument("page query must not be empty");
    if (timestamp < 0) throw_invalid_argument("page timestamp must be >= 0");
    DialoguePage page;
    page.id = ids.next<PageId>();
    page.query = std::move(query);
    page.response = std::move(response);
    page.timestamp = timestamp;
    return page;
}

std::string page_text(const DialoguePage& page) {
    if (page.response.empty()) return page.query;
    return page.query + "\n" + page.response;
}

FactQueue::FactQueue(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw_invalid_argument("fact queue capacity must be >= 1");
}

std::optional<FactEntry> FactQueue::push(FactEntry entry) {
    entries_.push_back(std::move(entry));
    if (entries_.size() <= capacity_) return std::nullopt;
    FactEntry evicted = std::move(entries_.front());
    entries_.pop_front();
    return evicted;
}

std::size_t recalled_tokens(const RetrievalBundle& bundle) {
    using text::count_whitespace_tokens;
    std::size_t total = 0;
    for (const auto& page : bundle.stm_pages) {
        total += count_whitespace_tokens(page.query) + count_whitespace_tokens(page.response);
    }
    for (const auto& hit : bundle.mtm_pages) {
        total += count_whitespace_tokens(hit.page.query) + count_whitespace_tokens(hit.page.response);
    }
    for (const auto& hit : bundle.user_kb_hits) total += count_whitespace_tokens(hit.fact.text);
    for (const auto& hit : bundle.agent_trait_hits) total += count_whitespace_tokens(hit.fact.text);
    for (const auto& [key, value] : bundle.user_profile) total += count_whitespace_tokens(value);
    for (const auto& [key, value] : bundle.agent_profile) total += count_whitespace_tokens(value);
    for (const auto& [key, trait] : bundle.user_traits) total += count_whitespace_tokens(trait.value);
    return total;
}

} // namespace strata
