#pragma once

#include "strata/ids.hpp"
#include "strata/mtm.hpp"
#include "strata/provider.hpp"
#include "strata/types.hpp"

#include <random>
#include <string>
#include <vector>

namespace strata::bench {

inline std::string random_text(std::mt19937& rng, int words) {
    static const char* vocab[] = {"hiking", "trail",  "coffee", "curry",  "beagle", "airflow", "deploy", "spanish",
                                  "mexico", "museum", "novel",  "sister", "garden", "guitar",  "piano",  "flight"};
    std::uniform_int_distribution<int> pick(0, 15);
    std::string out;
    for (int i = 0; i < words; ++i) {
        if (!out.empty()) out += ' ';
        out += vocab[pick(rng)];
    }
    return out;
}

// An MTM with `segments` segments of `pages_per_segment` stub-embedded pages.
inline MidTermMemory random_mtm(std::mt19937& rng, Provider& provider, IdSequence& ids, std::size_t segments,
                                std::size_t pages_per_segment, std::size_t capacity) {
    std::vector<Segment> out;
    for (std::size_t s = 0; s < segments; ++s) {
        Segment seg;
        seg.id = ids.next<SegmentId>();
        for (std::size_t p = 0; p < pages_per_segment; ++p) {
            DialoguePage page = new_page(ids, random_text(rng, 6), random_text(rng, 8), static_cast<Timestamp>(s));
            page.chain_id = ids.next<ChainId>();
            page.keywords = provider.extract_keywords(page_text(page));
            page.embedding = provider.embed(page_text(page));
            seg.pages.push_back(std::move(page));
        }
        seg.summary = random_text(rng, 10);
        seg.keywords = provider.extract_keywords(seg.summary);
        seg.embedding = provider.embed(seg.summary);
        seg.n_visit = rng() % 5;
        seg.l_interaction = rng() % (pages_per_segment + 1);
        seg.last_access = static_cast<Timestamp>(s);
        out.push_back(std::move(seg));
    }
    return MidTermMemory::restore(capacity, std::move(out));
}

} // namespace strata::bench
