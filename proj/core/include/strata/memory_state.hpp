#pragma once

#include "strata/config.hpp"
#include "strata/ids.hpp"
#include "strata/mtm.hpp"
#include "strata/stm.hpp"
#include "strata/types.hpp"

#include <string>
#include <vector>

namespace strata {

// Complete memory of one user across the three tiers.
struct MemoryState {
    std::string user_id;
    IdSequence ids;
    Timestamp clock = 0;  // latest timestamp applied to this memory
    ShortTermMemory stm;
    MidTermMemory mtm;
    PersonaStore persona;

    static MemoryState empty(std::string user_id, const Config& config);

    friend bool operator==(const MemoryState&, const MemoryState&) = default;
};

// Human-readable descriptions of every broken invariant; empty when
// consistent. With a config, also checks embedding dimension and trait schema.
std::vector<std::string> invariant_violations(const MemoryState& state, const Config* config = nullptr);

// Throws Error(corruption) naming the first violated invariant.
void check_invariants(const MemoryState& state, const Config* config = nullptr);

} // namespace strata
