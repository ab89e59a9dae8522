#include "strata/service.hpp"

#include "strata/error.hpp"
#include "strata/mtm.hpp"
#include "strata/persistence.hpp"
#include "strata/provider.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <regex>

namespace strata {
namespace {

Timestamp system_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

Json error_body(std::string_view code, const std::string& message) {
    Json body;
    body["code"] = code;
    body["message"] = message;
    return body;
}

ServiceResponse json_response(int status, const Json& body) {
    return {status, body.dump() + "\n", "application/json"};
}

Json tier_counts(const MemoryState& state) {
    Json counts;
    counts["stm"] = state.stm.size();
    counts["mtm_segments"] = state.mtm.size();
    counts["mtm_pages"] = state.mtm.page_count();
    counts["user_kb"] = state.persona.user_kb.size();
    counts["user_traits"] = state.persona.user_traits.size();
    counts["agent_traits"] = state.persona.agent_traits.size();
    return counts;
}

Json bundle_counts(const RetrievalBundle& bundle) {
    Json counts;
    counts["stm_pages"] = bundle.stm_pages.size();
    counts["mtm_pages"] = bundle.mtm_pages.size();
    counts["user_kb_hits"] = bundle.user_kb_hits.size();
    counts["agent_trait_hits"] = bundle.agent_trait_hits.size();
    return counts;
}

Json usage_stats(const ProviderUsage& usage) {
    Json stats;
    stats["provider_calls"] = usage.calls;
    stats["failed_provider_calls"] = usage.failed_calls;
    stats["input_tokens"] = usage.input_tokens;
    stats["output_tokens"] = usage.output_tokens;
    return stats;
}

Json update_json(const UpdateReport& update) {
    Json out;
    out["page_id"] = update.page_id.value;
    out["stm_overflow"] = update.stm_overflow ? Json(update.stm_overflow->value) : Json(nullptr);
    out["mtm_segment"] = update.mtm_segment ? Json(update.mtm_segment->value) : Json(nullptr);
    out["created_segment"] = update.created_segment;
    Json evicted = Json::array();
    for (const auto& segment : update.evicted) evicted.push_back(segment.id.value);
    out["evicted_segments"] = std::move(evicted);
    Json promoted = Json::array();
    for (const auto& id : update.promoted) promoted.push_back(id.value);
    out["promoted_segments"] = std::move(promoted);
    out["promotion_failures"] = update.promotion_failures;
    out["degraded_chain"] = update.degraded_chain;
    return out;
}

Json parse_body(const std::string& body) {
    if (body.empty()) return Json::object();
    try {
        Json doc = Json::parse(body);
        if (!doc.is_object()) throw Error(ErrorCode::invalid_argument, "request body must be a JSON object");
        return doc;
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::invalid_argument, std::string("malformed JSON body: ") + e.what());
    }
}

std::string required_string(const Json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) {
        throw Error(ErrorCode::invalid_argument, std::string("field '") + key + "' must be a string");
    }
    return it->get<std::string>();
}

std::optional<Timestamp> optional_now(const Json& body) {
    auto it = body.find("now");
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) throw Error(ErrorCode::invalid_argument, "field 'now' must be an integer");
    return it->get<Timestamp>();
}

std::optional<Timestamp> now_from_query(const std::map<std::string, std::string>& query) {
    auto it = query.find("now");
    if (it == query.end()) return std::nullopt;
    try {
        std::size_t used = 0;
        Timestamp value = std::stoll(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw Error(ErrorCode::invalid_argument, "query parameter 'now' must be an integer");
    }
}

Json facts_json(const FactQueue& queue) {
    Json out = Json::array();
    for (const auto& fact : queue.entries()) {
        Json entry;
        entry["text"] = fact.text;
        entry["source_segment"] = fact.source_segment.value;
        entry["created_at"] = fact.created_at;
        out.push_back(std::move(entry));
    }
    return out;
}

} // namespace

std::optional<Tier> tier_from_string(std::string_view name) {
    if (name == "stm") return Tier::stm;
    if (name == "mtm") return Tier::mtm;
    if (name == "lpm") return Tier::lpm;
    return std::nullopt;
}

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::validation:
        return 400;
    case ErrorCode::not_found:
        return 404;
    case ErrorCode::provider_unavailable:
        return 503;
    case ErrorCode::io:
    case ErrorCode::parse:  // request bodies fail as invalid_argument; parse means stored data
    case ErrorCode::version:
    case ErrorCode::corruption:
        return 500;
    }
    return 500;
}

Json dump_stm(const MemoryState& state) {
    Json out;
    out["user_id"] = state.user_id;
    out["tier"] = "stm";
    out["capacity"] = state.stm.capacity();
    Json pages = Json::array();
    for (const auto& page : state.stm.pages()) pages.push_back(page_to_wire(page));
    out["pages"] = std::move(pages);
    return out;
}

Json dump_mtm(const MemoryState& state, Timestamp now, const HeatWeights& weights) {
    Json out;
    out["user_id"] = state.user_id;
    out["tier"] = "mtm";
    out["capacity"] = state.mtm.capacity();
    out["now"] = now;
    Json segments = Json::array();
    for (const auto& [id, segment] : state.mtm.segments()) {
        Json entry;
        entry["id"] = id.value;
        entry["heat"] = heat(segment, now, weights);
        entry["n_visit"] = segment.n_visit;
        entry["l_interaction"] = segment.l_interaction;
        entry["last_access"] = segment.last_access;
        entry["summary"] = segment.summary;
        entry["keywords"] = segment.keywords;
        Json pages = Json::array();
        for (const auto& page : segment.pages) pages.push_back(page_to_wire(page));
        entry["pages"] = std::move(pages);
        segments.push_back(std::move(entry));
    }
    out["segments"] = std::move(segments);
    return out;
}

Json dump_lpm(const MemoryState& state) {
    const auto& persona = state.persona;
    Json out;
    out["user_id"] = state.user_id;
    out["tier"] = "lpm";
    out["user_profile"] = persona.user_profile;
    Json traits = Json::object();
    for (const auto& [dimension, trait] : persona.user_traits) traits[dimension] = to_json(trait);
    out["user_traits"] = std::move(traits);
    out["user_kb"] = facts_json(persona.user_kb);
    out["user_kb_capacity"] = persona.user_kb.capacity();
    out["agent_profile"] = persona.agent_profile;
    out["agent_traits"] = facts_json(persona.agent_traits);
    out["agent_traits_capacity"] = persona.agent_traits.capacity();
    return out;
}

Service::Service(const Engine& engine, ServiceOptions options)
    : engine_(engine), options_(std::move(options)), registry_(engine.config(), options_.data_dir) {
    if (!options_.clock) options_.clock = system_seconds;
}

Timestamp Service::resolve_now(const MemoryState& state, std::optional<Timestamp> now) const {
    if (now) {
        if (*now < 0) throw_invalid_argument("'now' must be >= 0");
        return *now;
    }
    return std::max(options_.clock(), state.clock);
}

void Service::persist(const MemoryState& state, Timestamp now, const std::vector<Segment>& evicted) const {
    save(MemorySnapshot{kSnapshotVersion, state, now}, options_.data_dir);
    if (!options_.archive_evicted) return;
    for (const auto& segment : evicted) {
        try {
            archive_segment(segment, state.user_id, options_.data_dir);
        } catch (const Error& e) {
            // The snapshot is already committed; a lost archive line is logged, not fatal.
            spdlog::error("archiving segment {} for user {} failed: {}", segment.id.value, state.user_id, e.what());
        }
    }
}

Json Service::respond(const std::string& user_id, const std::string& query, std::optional<Timestamp> now) {
    Json out;
    registry_.write(user_id, [&](const MemoryState& current) -> std::optional<MemoryState> {
        MemoryState work = current;
        const Timestamp ts = resolve_now(current, now);
        ProviderCallScope scope;
        RespondResult result = engine_.respond(work, query, ts);
        persist(work, ts, result.update.evicted);

        out["response"] = result.response;
        out["counts"] = tier_counts(work);
        out["bundle"] = bundle_counts(result.bundle);
        Json stats = usage_stats(scope.usage());
        stats["recalled_tokens"] = recalled_tokens(result.bundle);
        out["stats"] = std::move(stats);
        out["update"] = update_json(result.update);
        return work;
    });
    return out;
}

Json Service::retrieve(const std::string& user_id, const std::string& query, bool touch,
                       std::optional<Timestamp> now) {
    Json out;
    if (!touch) {
        auto state = registry_.read(user_id);
        ProviderCallScope scope;
        RetrievalBundle bundle = engine_.peek(*state, query);
        out["bundle"] = bundle_to_wire(bundle);
        out["touched"] = false;
        out["stats"] = usage_stats(scope.usage());
        return out;
    }
    registry_.write(user_id, [&](const MemoryState& current) -> std::optional<MemoryState> {
        MemoryState work = current;
        const Timestamp ts = resolve_now(current, now);
        ProviderCallScope scope;
        RetrievalBundle bundle = engine_.retrieve(work, query, ts);
        persist(work, ts, {});
        out["bundle"] = bundle_to_wire(bundle);
        out["touched"] = true;
        out["stats"] = usage_stats(scope.usage());
        return work;
    });
    return out;
}

Json Service::inspect(const std::string& user_id, Tier tier, std::optional<Timestamp> now) {
    auto state = registry_.read(user_id);
    switch (tier) {
    case Tier::stm:
        return dump_stm(*state);
    case Tier::mtm:
        return dump_mtm(*state, resolve_now(*state, now), engine_.config().heat);
    case Tier::lpm:
        return dump_lpm(*state);
    }
    throw_invalid_argument("unknown tier");
}

Json Service::ingest(const std::string& user_id, std::string query, std::string response,
                     std::optional<Timestamp> now) {
    Json out;
    registry_.write(user_id, [&](const MemoryState& current) -> std::optional<MemoryState> {
        MemoryState work = current;
        const Timestamp ts = resolve_now(current, now);
        ProviderCallScope scope;
        UpdateReport update = engine_.ingest(work, query, response, ts);
        persist(work, ts, update.evicted);
        out["counts"] = tier_counts(work);
        out["stats"] = usage_stats(scope.usage());
        out["update"] = update_json(update);
        return work;
    });
    return out;
}

Json Service::wipe(const std::string& user_id) {
    Json out;
    out["user_id"] = user_id;
    out["deleted"] = registry_.wipe(user_id);
    return out;
}

ServiceResponse Service::handle(const ServiceRequest& request) {
    static const std::regex user_route(R"(^/v1/users/([^/]+)(/.*)?$)");
    static const std::regex memory_route(R"(^/memory/([^/]+)$)");

    try {
        if (request.path == "/healthz") {
            if (request.method != "GET") return json_response(405, error_body("method_not_allowed", "use GET"));
            Json body;
            body["status"] = "ok";
            body["provider"] = engine_.provider().name();
            return json_response(200, body);
        }

        std::smatch match;
        if (!std::regex_match(request.path, match, user_route)) {
            return json_response(404, error_body("not_found", "no route for " + request.path));
        }
        if (options_.bearer_token) {
            const std::string expected = "Bearer " + *options_.bearer_token;
            if (!request.authorization || *request.authorization != expected) {
                return json_response(401, error_body("unauthorized", "missing or invalid bearer token"));
            }
        }
        const std::string user_id = match[1].str();
        const std::string rest = match[2].str();
        if (!is_valid_user_id(user_id)) {
            return json_response(400, error_body("invalid_argument", "invalid user id '" + user_id + "'"));
        }
        auto method_not_allowed = [&](const char* allowed) {
            return json_response(405, error_body("method_not_allowed", std::string("use ") + allowed));
        };

        if (rest.empty()) {
            if (request.method != "DELETE") return method_not_allowed("DELETE");
            return json_response(200, wipe(user_id));
        }
        if (rest == "/respond") {
            if (request.method != "POST") return method_not_allowed("POST");
            const Json body = parse_body(request.body);
            return json_response(200, respond(user_id, required_string(body, "query"), optional_now(body)));
        }
        if (rest == "/retrieve") {
            if (request.method != "POST") return method_not_allowed("POST");
            const Json body = parse_body(request.body);
            bool touch = false;
            if (auto it = body.find("touch"); it != body.end()) {
                if (!it->is_boolean()) throw_invalid_argument("field 'touch' must be a boolean");
                touch = it->get<bool>();
            }
            return json_response(200, retrieve(user_id, required_string(body, "query"), touch, optional_now(body)));
        }
        if (rest == "/messages") {
            if (request.method != "POST") return method_not_allowed("POST");
            const Json body = parse_body(request.body);
            return json_response(200, ingest(user_id, required_string(body, "query"),
                                             required_string(body, "response"), optional_now(body)));
        }
        std::smatch tier_match;
        if (std::regex_match(rest, tier_match, memory_route)) {
            if (request.method != "GET") return method_not_allowed("GET");
            const auto tier = tier_from_string(tier_match[1].str());
            if (!tier) {
                return json_response(400, error_body("invalid_argument", "tier must be one of stm, mtm, lpm"));
            }
            return json_response(200, inspect(user_id, *tier, now_from_query(request.query)));
        }
        return json_response(404, error_body("not_found", "no route for " + request.path));
    } catch (const Error& e) {
        const int status = http_status(e.code());
        if (status >= 500) spdlog::warn("{} {} -> {}: {}", request.method, request.path, status, e.what());
        return json_response(status, error_body(to_string(e.code()), e.what()));
    } catch (const std::exception& e) {
        spdlog::error("{} {} -> 500: {}", request.method, request.path, e.what());
        return json_response(500, error_body("internal", e.what()));
    }
}

} // namespace strata
