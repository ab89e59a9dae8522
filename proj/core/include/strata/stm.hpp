#pragma once

#include "strata/ids.hpp"
#include "strata/types.hpp"

#include <deque>
#include <optional>
#include <vector>

namespace strata {

class Provider;

struct StmAppendResult {
    std::optional<DialoguePage> overflow;
    bool joined_chain = false;
    bool degraded = false;  // provider failed; page got a fallback single-page chain
};

// Fixed-capacity FIFO of dialogue pages, oldest first, with dialogue chains.
class ShortTermMemory {
public:
    explicit ShortTermMemory(std::size_t capacity = 7);

    // Rebuilds a queue from persisted pages; throws corruption on invariant
    // violations.
    static ShortTermMemory restore(std::size_t capacity, std::vector<DialoguePage> pages);

    // Links the page into the newest chain (or starts a new one), appends it at
    // the tail and evicts the head once the queue exceeds capacity. Provider
    // failures degrade to a fresh single-page chain instead of failing.
    StmAppendResult append(DialoguePage page, Provider& provider, IdSequence& ids);

    std::vector<DialoguePage> all_pages() const { return {queue_.begin(), queue_.end()}; }
    const std::deque<DialoguePage>& pages() const noexcept { return queue_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return queue_.size(); }
    bool empty() const noexcept { return queue_.empty(); }

    friend bool operator==(const ShortTermMemory&, const ShortTermMemory&) = default;

private:
    std::size_t capacity_;
    std::deque<DialoguePage> queue_;
};

// Meta used when the provider cannot summarize a chain.
std::string fallback_chain_meta(const DialoguePage& page);

} // namespace strata
