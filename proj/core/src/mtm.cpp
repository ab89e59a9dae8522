#include "strata/mtm.hpp"

#include "strata/error.hpp"
#include "strata/provider.hpp"

#include <algorithm>
#include <cmath>

namespace strata {

double f_score(const DialoguePage& page, const Segment& segment) {
    return cosine(segment.embedding, page.embedding) + jaccard(segment.keywords, page.keywords);
}

double heat(const Segment& segment, Timestamp now, const HeatWeights& weights) {
    if (now < segment.last_access) {
        throw_invalid_argument("clock went backwards: now=" + std::to_string(now) +
                               " precedes last_access=" + std::to_string(segment.last_access) +
                               " of segment " + std::to_string(segment.id.value));
    }
    const double elapsed = static_cast<double>(now - segment.last_access);
    const double recency = std::exp(-elapsed / weights.mu);
    return weights.alpha * static_cast<double>(segment.n_visit) +
           weights.beta * static_cast<double>(segment.l_interaction) + weights.gamma * recency;
}

bool evicts_before(const Segment& a, double heat_a, const Segment& b, double heat_b) {
    if (heat_a != heat_b) return heat_a < heat_b;
    if (a.last_access != b.last_access) return a.last_access < b.last_access;
    return a.id < b.id;
}

MidTermMemory::MidTermMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw_invalid_argument("mtm capacity must be >= 1");
}

MidTermMemory MidTermMemory::restore(std::size_t capacity, std::vector<Segment> segments) {
    if (capacity == 0) throw Error(ErrorCode::corruption, "mtm: capacity must be >= 1");
    if (segments.size() > capacity) {
        throw Error(ErrorCode::corruption, "mtm: segment count " + std::to_string(segments.size()) +
                                               " exceeds capacity " + std::to_string(capacity));
    }
    MidTermMemory mtm(capacity);
    for (auto& segment : segments) {
        const auto id = segment.id;
        if (!id.assigned()) throw Error(ErrorCode::corruption, "mtm: segment without id");
        if (segment.pages.empty()) {
            throw Error(ErrorCode::corruption, "mtm: segment " + std::to_string(id.value) + " has no pages");
        }
        if (segment.l_interaction > segment.pages.size()) {
            throw Error(ErrorCode::corruption, "mtm: segment " + std::to_string(id.value) +
                                                   " has l_interaction above its page count");
        }
        if (!mtm.segments_.emplace(id, std::move(segment)).second) {
            throw Error(ErrorCode::corruption, "mtm: duplicate segment id " + std::to_string(id.value));
        }
    }
    return mtm;
}

MtmInsertResult MidTermMemory::insert_page(DialoguePage page, double theta, const HeatWeights& weights,
                                           Provider& provider, IdSequence& ids, Timestamp now) {
    for (const auto& [id, segment] : segments_) {
        if (now < segment.last_access) {
            throw_invalid_argument("clock went backwards: now=" + std::to_string(now) +
                                   " precedes last_access of segment " + std::to_string(id.value));
        }
    }
    const std::string text_of_page = page_text(page);
    if (page.embedding.empty()) {
        page.keywords = provider.extract_keywords(text_of_page);
        page.embedding = provider.embed(text_of_page);
    }

    const Segment* best = nullptr;
    double best_score = 0.0;
    for (const auto& [id, segment] : segments_) {
        const double score = f_score(page, segment);
        if (score > theta && (best == nullptr || score > best_score)) {
            best = &segment;
            best_score = score;
        }
    }

    Segment updated;
    if (best != nullptr) {
        updated = *best;
        updated.pages.push_back(std::move(page));
        updated.l_interaction += 1;
    } else {
        updated.pages.push_back(std::move(page));
        updated.n_visit = 0;
        updated.l_interaction = 1;
        updated.last_access = now;
    }
    std::vector<std::string> texts;
    texts.reserve(updated.pages.size());
    for (const auto& p : updated.pages) texts.push_back(page_text(p));
    updated.summary = provider.summarize(SummaryKind::segment_summary, texts);
    updated.keywords = provider.extract_keywords(updated.summary);
    updated.embedding = provider.embed(updated.summary);

    // Commit point: nothing below calls the provider.
    MtmInsertResult result;
    result.created = best == nullptr;
    if (result.created) updated.id = ids.next<SegmentId>();
    result.segment_id = updated.id;
    segments_[updated.id] = std::move(updated);

    if (segments_.size() > capacity_) {
        const SegmentId victim = *coldest(weights, now);
        auto node = segments_.extract(victim);
        result.evicted = std::move(node.mapped());
    }
    return result;
}

void MidTermMemory::touch(SegmentId id, Timestamp now) {
    Segment& segment = mutable_at(id);
    if (now < segment.last_access) {
        throw_invalid_argument("clock went backwards while touching segment " + std::to_string(id.value));
    }
    segment.n_visit += 1;
    segment.last_access = now;
}

void MidTermMemory::reset_after_promotion(SegmentId id) {
    mutable_at(id).l_interaction = 0;
}

std::vector<Segment> MidTermMemory::hot_segments(double tau, const HeatWeights& weights, Timestamp now) const {
    std::vector<std::pair<double, const Segment*>> hot;
    for (const auto& [id, segment] : segments_) {
        const double h = heat(segment, now, weights);
        if (h > tau) hot.emplace_back(h, &segment);
    }
    std::stable_sort(hot.begin(), hot.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Segment> out;
    out.reserve(hot.size());
    for (const auto& [h, segment] : hot) out.push_back(*segment);
    return out;
}

std::optional<SegmentId> MidTermMemory::coldest(const HeatWeights& weights, Timestamp now) const {
    const Segment* victim = nullptr;
    double victim_heat = 0.0;
    for (const auto& [id, segment] : segments_) {
        const double h = heat(segment, now, weights);
        if (victim == nullptr || evicts_before(segment, h, *victim, victim_heat)) {
            victim = &segment;
            victim_heat = h;
        }
    }
    if (victim == nullptr) return std::nullopt;
    return victim->id;
}

const Segment* MidTermMemory::find(SegmentId id) const {
    auto it = segments_.find(id);
    return it == segments_.end() ? nullptr : &it->second;
}

const Segment& MidTermMemory::at(SegmentId id) const {
    if (const Segment* s = find(id)) return *s;
    throw_not_found("segment " + std::to_string(id.value) + " not found");
}

Segment& MidTermMemory::mutable_at(SegmentId id) {
    auto it = segments_.find(id);
    if (it == segments_.end()) throw_not_found("segment " + std::to_string(id.value) + " not found");
    return it->second;
}

std::size_t MidTermMemory::page_count() const {
    std::size_t n = 0;
    for (const auto& [id, segment] : segments_) n += segment.pages.size();
    return n;
}

} // namespace strata
