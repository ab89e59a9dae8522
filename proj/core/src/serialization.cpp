#include "strata/serialization.hpp"

#include "strata/error.hpp"

namespace strata {
namespace {

// Typed accessor that reports the JSON path of whatever is wrong.
class Reader {
public:
    Reader(const Json& doc, std::string path) : doc_(doc), path_(std::move(path)) {}

    Reader field(const char* name) const {
        if (!doc_.is_object()) fail("expected an object");
        auto it = doc_.find(name);
        if (it == doc_.end()) fail(std::string("missing field \"") + name + "\"");
        return Reader(*it, path_ + "." + name);
    }

    bool has(const char* name) const { return doc_.is_object() && doc_.contains(name); }

    std::size_t size() const {
        if (!doc_.is_array()) fail("expected an array");
        return doc_.size();
    }

    Reader at(std::size_t i) const { return Reader(doc_.at(i), path_ + "[" + std::to_string(i) + "]"); }

    std::string str() const {
        if (!doc_.is_string()) fail("expected a string");
        return doc_.get<std::string>();
    }

    std::int64_t integer() const {
        if (!doc_.is_number_integer()) fail("expected an integer");
        return doc_.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer() const {
        if (!doc_.is_number_unsigned() && !(doc_.is_number_integer() && doc_.get<std::int64_t>() >= 0)) {
            fail("expected a non-negative integer");
        }
        return doc_.get<std::uint64_t>();
    }

    double number() const {
        if (!doc_.is_number()) fail("expected a number");
        return doc_.get<double>();
    }

    std::vector<double> vector() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
        return out;
    }

    KeywordSet keyword_set() const {
        KeywordSet out;
        for (std::size_t i = 0; i < size(); ++i) out.insert(at(i).str());
        return out;
    }

    ProfileMap string_map() const {
        if (!doc_.is_object()) fail("expected an object");
        ProfileMap out;
        for (const auto& [key, value] : doc_.items()) out[key] = Reader(value, path_ + "." + key).str();
        return out;
    }

    const Json& raw() const { return doc_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const { throw Error(ErrorCode::parse, path_ + ": " + what); }

private:
    const Json& doc_;
    std::string path_;
};

Json profile_to_json(const ProfileMap& profile) {
    Json out = Json::object();
    for (const auto& [key, value] : profile) out[key] = value;
    return out;
}

} // namespace

Json to_json(const DialoguePage& page) {
    Json out;
    out["id"] = page.id.value;
    out["query"] = page.query;
    out["response"] = page.response;
    out["timestamp"] = page.timestamp;
    out["chain_id"] = page.chain_id.value;
    out["chain_meta"] = page.chain_meta;
    out["keywords"] = page.keywords;
    out["embedding"] = page.embedding;
    return out;
}

Json to_json(const Segment& segment) {
    Json out;
    out["id"] = segment.id.value;
    Json pages = Json::array();
    for (const auto& page : segment.pages) pages.push_back(to_json(page));
    out["pages"] = std::move(pages);
    out["summary"] = segment.summary;
    out["keywords"] = segment.keywords;
    out["embedding"] = segment.embedding;
    out["n_visit"] = segment.n_visit;
    out["l_interaction"] = segment.l_interaction;
    out["last_access"] = segment.last_access;
    return out;
}

Json to_json(const FactEntry& fact) {
    Json out;
    out["text"] = fact.text;
    out["embedding"] = fact.embedding;
    out["source_segment"] = fact.source_segment.value;
    out["created_at"] = fact.created_at;
    return out;
}

Json to_json(const FactQueue& queue) {
    Json out;
    out["capacity"] = queue.capacity();
    Json entries = Json::array();
    for (const auto& fact : queue.entries()) entries.push_back(to_json(fact));
    out["entries"] = std::move(entries);
    return out;
}

Json to_json(const TraitValue& trait) {
    Json out;
    out["value"] = trait.value;
    out["confidence"] = trait.confidence;
    out["last_updated"] = trait.last_updated;
    return out;
}

Json to_json(const PersonaStore& persona) {
    Json out;
    out["user_profile"] = profile_to_json(persona.user_profile);
    out["user_kb"] = to_json(persona.user_kb);
    Json traits = Json::object();
    for (const auto& [dimension, trait] : persona.user_traits) traits[dimension] = to_json(trait);
    out["user_traits"] = std::move(traits);
    out["agent_profile"] = profile_to_json(persona.agent_profile);
    out["agent_traits"] = to_json(persona.agent_traits);
    return out;
}

Json to_json(const ShortTermMemory& stm) {
    Json out;
    out["capacity"] = stm.capacity();
    Json pages = Json::array();
    for (const auto& page : stm.pages()) pages.push_back(to_json(page));
    out["pages"] = std::move(pages);
    return out;
}

Json to_json(const MidTermMemory& mtm) {
    Json out;
    out["capacity"] = mtm.capacity();
    Json segments = Json::array();
    for (const auto& [id, segment] : mtm.segments()) segments.push_back(to_json(segment));
    out["segments"] = std::move(segments);
    return out;
}

DialoguePage page_from_json(const Json& doc, const std::string& path) {
    Reader r(doc, path);
    DialoguePage page;
    page.id = PageId{r.field("id").unsigned_integer()};
    page.query = r.field("query").str();
    page.response = r.field("response").str();
    page.timestamp = r.field("timestamp").integer();
    page.chain_id = ChainId{r.field("chain_id").unsigned_integer()};
    page.chain_meta = r.field("chain_meta").str();
    page.keywords = r.field("keywords").keyword_set();
    page.embedding = r.field("embedding").vector();
    if (page.query.empty()) throw Error(ErrorCode::corruption, path + ": page query must not be empty");
    if (page.timestamp < 0) throw Error(ErrorCode::corruption, path + ": page timestamp must be >= 0");
    return page;
}

Segment segment_from_json(const Json& doc, const std::string& path) {
    Reader r(doc, path);
    Segment segment;
    segment.id = SegmentId{r.field("id").unsigned_integer()};
    auto pages = r.field("pages");
    for (std::size_t i = 0; i < pages.size(); ++i) {
        segment.pages.push_back(page_from_json(pages.at(i).raw(), pages.at(i).path()));
    }
    segment.summary = r.field("summary").str();
    segment.keywords = r.field("keywords").keyword_set();
    segment.embedding = r.field("embedding").vector();
    segment.n_visit = r.field("n_visit").unsigned_integer();
    segment.l_interaction = r.field("l_interaction").unsigned_integer();
    segment.last_access = r.field("last_access").integer();
    if (segment.pages.empty()) throw Error(ErrorCode::corruption, path + ": segment must have at least one page");
    return segment;
}

FactEntry fact_from_json(const Json& doc, const std::string& path) {
    Reader r(doc, path);
    FactEntry fact;
    fact.text = r.field("text").str();
    fact.embedding = r.field("embedding").vector();
    fact.source_segment = SegmentId{r.field("source_segment").unsigned_integer()};
    fact.created_at = r.field("created_at").integer();
    if (fact.text.empty()) throw Error(ErrorCode::corruption, path + ": fact text must not be empty");
    return fact;
}

FactQueue fact_queue_from_json(const Json& doc, const std::string& path) {
    Reader r(doc, path);
    const auto capacity = r.field("capacity").unsigned_integer();
    if (capacity == 0) throw Error(ErrorCode::corruption, path + ": capacity must be >= 1");
    auto entries = r.field("entries");
    if (entries.size() > capacity) {
        throw Error(ErrorCode::corruption, path + ": " + std::to_string(entries.size()) +
                                               " entries exceed capacity " + std::to_string(capacity));
    }
    FactQueue queue(capacity);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        queue.push(fact_from_json(entries.at(i).raw(), entries.at(i).path()));
    }
    return queue;
}

PersonaStore persona_from_json(const Json& doc, const std::string& path) {
    Reader r(doc, path);
    PersonaStore persona;
    persona.user_profile = r.field("user_profile").string_map();
    persona.user_kb = fact_queue_from_json(r.field("user_kb").raw(), path + ".user_kb");
    auto traits = r.field("user_traits");
    if (!traits.raw().is_object()) traits.fail("expected an object");
    for (const auto& [dimension, value] : traits.raw().items()) {
        Reader t(value, traits.path() + "." + dimension);
        persona.user_traits[dimension] =
            TraitValue{t.field("value").str(), t.field("confidence").number(), t.field("last_updated").integer()};
    }
    persona.agent_profile = r.field("agent_profile").string_map();
    persona.agent_traits = fact_queue_from_json(r.field("agent_traits").raw(), path + ".agent_traits");
    return persona;
}

ShortTermMemory stm_from_json(const Json& doc, const std::string& path) {
    Reader r(doc, path);
    const auto capacity = r.field("capacity").unsigned_integer();
    auto pages = r.field("pages");
    std::vector<DialoguePage> out;
    for (std::size_t i = 0; i < pages.size(); ++i) out.push_back(page_from_json(pages.at(i).raw(), pages.at(i).path()));
    return ShortTermMemory::restore(capacity, std::move(out));
}

MidTermMemory mtm_from_json(const Json& doc, const std::string& path) {
    Reader r(doc, path);
    const auto capacity = r.field("capacity").unsigned_integer();
    auto segments = r.field("segments");
    std::vector<Segment> out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        out.push_back(segment_from_json(segments.at(i).raw(), segments.at(i).path()));
    }
    return MidTermMemory::restore(capacity, std::move(out));
}

Json page_to_wire(const DialoguePage& page) {
    Json out;
    out["id"] = page.id.value;
    out["query"] = page.query;
    out["response"] = page.response;
    out["timestamp"] = page.timestamp;
    out["chain_id"] = page.chain_id.value;
    out["chain_meta"] = page.chain_meta;
    out["keywords"] = page.keywords;
    return out;
}

Json bundle_to_wire(const RetrievalBundle& bundle) {
    auto facts = [](const std::vector<ScoredFact>& hits) {
        Json out = Json::array();
        for (const auto& hit : hits) {
            Json entry;
            entry["text"] = hit.fact.text;
            entry["source_segment"] = hit.fact.source_segment.value;
            entry["created_at"] = hit.fact.created_at;
            entry["score"] = hit.score;
            out.push_back(std::move(entry));
        }
        return out;
    };
    Json out;
    Json stm = Json::array();
    for (const auto& page : bundle.stm_pages) stm.push_back(page_to_wire(page));
    out["stm_pages"] = std::move(stm);
    Json mtm = Json::array();
    for (const auto& hit : bundle.mtm_pages) {
        Json entry;
        entry["page"] = page_to_wire(hit.page);
        entry["segment_id"] = hit.segment_id.value;
        entry["score"] = hit.score;
        mtm.push_back(std::move(entry));
    }
    out["mtm_pages"] = std::move(mtm);
    out["user_kb_hits"] = facts(bundle.user_kb_hits);
    out["agent_trait_hits"] = facts(bundle.agent_trait_hits);
    out["user_profile"] = profile_to_json(bundle.user_profile);
    Json traits = Json::object();
    for (const auto& [dimension, trait] : bundle.user_traits) traits[dimension] = to_json(trait);
    out["user_traits"] = std::move(traits);
    out["agent_profile"] = profile_to_json(bundle.agent_profile);
    return out;
}

} // namespace strata
