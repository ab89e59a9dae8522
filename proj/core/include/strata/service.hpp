#pragma once

#include "strata/engine.hpp"
#include "strata/error.hpp"
#include "strata/serialization.hpp"
#include "strata/session_registry.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace strata {

// Transport-neutral request/response so routing can be exercised without
// sockets; HttpServer adapts these to cpp-httplib.
struct ServiceRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
    std::optional<std::string> authorization;
};

struct ServiceResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

struct ServiceOptions {
    std::filesystem::path data_dir;
    std::optional<std::string> bearer_token;
    bool archive_evicted = true;
    // Wall clock used when a request does not pass "now"; seconds.
    std::function<Timestamp()> clock;
};

enum class Tier { stm, mtm, lpm };

std::optional<Tier> tier_from_string(std::string_view name);

// Per-user memory service. Each mutating handler works on a copy of the
// user's state and publishes it only after the snapshot is durably saved,
// so a failed request changes neither memory nor disk.
class Service {
public:
    Service(const Engine& engine, ServiceOptions options);

    ServiceResponse handle(const ServiceRequest& request);

    // Typed handlers; these throw strata::Error on failure.
    Json respond(const std::string& user_id, const std::string& query, std::optional<Timestamp> now);
    Json retrieve(const std::string& user_id, const std::string& query, bool touch, std::optional<Timestamp> now);
    Json inspect(const std::string& user_id, Tier tier, std::optional<Timestamp> now);
    Json ingest(const std::string& user_id, std::string query, std::string response, std::optional<Timestamp> now);
    Json wipe(const std::string& user_id);

    SessionRegistry& registry() noexcept { return registry_; }
    const Engine& engine() const noexcept { return engine_; }

private:
    Timestamp resolve_now(const MemoryState& state, std::optional<Timestamp> now) const;
    void persist(const MemoryState& state, Timestamp now, const std::vector<Segment>& evicted) const;

    const Engine& engine_;
    ServiceOptions options_;
    SessionRegistry registry_;
};

// HTTP status for a library error code.
int http_status(ErrorCode code);

// Tier dumps used by the inspect endpoint and the CLI.
Json dump_stm(const MemoryState& state);
Json dump_mtm(const MemoryState& state, Timestamp now, const HeatWeights& weights);
Json dump_lpm(const MemoryState& state);

} // namespace strata
