#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace strata {

// Tagged 64-bit identifier. Zero is reserved for "unassigned".
template <class Tag>
struct Id {
    std::uint64_t value = 0;

    constexpr bool assigned() const noexcept { return value != 0; }
    friend constexpr auto operator<=>(const Id&, const Id&) = default;
};

using PageId = Id<struct PageTag>;
using SegmentId = Id<struct SegmentTag>;
using ChainId = Id<struct ChainTag>;

// Per-user monotone counter shared by every id kind. Ids are deterministic so a
// replayed input stream reproduces the same memory byte for byte.
class IdSequence {
public:
    IdSequence() = default;
    explicit IdSequence(std::uint64_t next) : next_(next == 0 ? 1 : next) {}

    template <class IdT>
    IdT next() { return IdT{next_++}; }

    std::uint64_t peek() const noexcept { return next_; }

    friend bool operator==(const IdSequence&, const IdSequence&) = default;

private:
    std::uint64_t next_ = 1;
};

} // namespace strata

template <class Tag>
struct std::hash<strata::Id<Tag>> {
    std::size_t operator()(const strata::Id<Tag>& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
