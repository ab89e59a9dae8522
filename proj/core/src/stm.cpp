#include "strata/stm.hpp"

#include "strata/error.hpp"
#include "strata/provider.hpp"
#include "strata/text.hpp"

#include <spdlog/spdlog.h>

namespace strata {

ShortTermMemory::ShortTermMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw_invalid_argument("stm capacity must be >= 1");
}

ShortTermMemory ShortTermMemory::restore(std::size_t capacity, std::vector<DialoguePage> pages) {
    if (capacity == 0) throw Error(ErrorCode::corruption, "stm: capacity must be >= 1");
    if (pages.size() > capacity) {
        throw Error(ErrorCode::corruption, "stm: queue length " + std::to_string(pages.size()) +
                                               " exceeds capacity " + std::to_string(capacity));
    }
    ShortTermMemory stm(capacity);
    for (std::size_t i = 0; i < pages.size(); ++i) {
        const auto& page = pages[i];
        if (i > 0 && !(pages[i - 1].id < page.id)) {
            throw Error(ErrorCode::corruption, "stm: pages are not in increasing insertion order");
        }
        if (!page.has_chain() || page.chain_meta.empty()) {
            throw Error(ErrorCode::corruption, "stm: page " + std::to_string(page.id.value) +
                                                   " lacks a chain or chain_meta");
        }
    }
    stm.queue_.assign(std::make_move_iterator(pages.begin()), std::make_move_iterator(pages.end()));
    return stm;
}

std::string fallback_chain_meta(const DialoguePage& page) {
    std::string meta = text::utf8_truncate(text::trim(page.query), 512);
    return meta.empty() ? std::string("(untitled)") : meta;
}

StmAppendResult ShortTermMemory::append(DialoguePage page, Provider& provider, IdSequence& ids) {
    if (page.has_chain()) throw_invalid_argument("page already belongs to a chain");
    if (!queue_.empty() && !(queue_.back().id < page.id)) {
        throw_invalid_argument("page ids must increase with insertion order");
    }

    StmAppendResult result;
    const std::string text_of_page = page_text(page);
    try {
        bool continues = false;
        if (!queue_.empty()) {
            try {
                continues = provider.judge_continuity(page, queue_.back().chain_meta);
            } catch (const ProviderUnavailable& e) {
                spdlog::warn("continuity check failed, starting a new chain: {}", e.what());
                result.degraded = true;
            }
        }
        std::vector<std::string> texts;
        if (continues) {
            const ChainId chain = queue_.back().chain_id;
            // Resident pages of the newest chain are the contiguous tail of the queue.
            auto it = queue_.end();
            while (it != queue_.begin() && std::prev(it)->chain_id == chain) --it;
            for (; it != queue_.end(); ++it) texts.push_back(page_text(*it));
        }
        texts.push_back(text_of_page);
        std::string meta = provider.summarize(SummaryKind::chain_meta, texts);
        page.chain_id = continues ? queue_.back().chain_id : ids.next<ChainId>();
        page.chain_meta = std::move(meta);
        result.joined_chain = continues;
    } catch (const ProviderUnavailable& e) {
        spdlog::warn("chain summary failed, page gets a single-page chain: {}", e.what());
        page.chain_id = ids.next<ChainId>();
        page.chain_meta = fallback_chain_meta(page);
        result.joined_chain = false;
        result.degraded = true;
    }

    queue_.push_back(std::move(page));
    if (queue_.size() > capacity_) {
        result.overflow = std::move(queue_.front());
        queue_.pop_front();
    }
    return result;
}

} // namespace strata
