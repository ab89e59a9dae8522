// strata: serve the memory engine over HTTP, inspect or wipe stored users,
// and replay transcripts offline.

#include "strata/config.hpp"
#include "strata/engine.hpp"
#include "strata/error.hpp"
#include "strata/http_server.hpp"
#include "strata/persistence.hpp"
#include "strata/prompt.hpp"
#include "strata/remote_provider.hpp"
#include "strata/replay.hpp"
#include "strata/service.hpp"
#include "strata/transcript.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>

namespace {

using namespace strata;

struct CommonOptions {
    std::string config_path;
    std::string provider = "stub";
    std::string prompt_template;
};

Config load_config(const std::string& path) {
    RawConfig raw = path.empty() ? RawConfig{} : load_raw_config(path);
    apply_env_overrides(raw, process_env);
    return validate_config(raw);
}

std::unique_ptr<Provider> make_provider(const std::string& kind, const Config& config) {
    if (kind == "stub") return std::make_unique<StubProvider>(config.embedding_dim);
    return std::make_unique<RemoteProvider>(RemoteProviderConfig::from_env(process_env, config.embedding_dim));
}

PromptTemplate make_template(const std::string& path) {
    return path.empty() ? PromptTemplate::builtin() : PromptTemplate::load(path);
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
    out << bytes;
    if (!out.flush()) throw Error(ErrorCode::io, "cannot write " + path);
}

HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

int run_serve(const CommonOptions& common, const std::string& data_dir, const std::string& listen,
              std::string token) {
    const Config config = load_config(common.config_path);
    auto provider = make_provider(common.provider, config);
    Engine engine(config, *provider, make_template(common.prompt_template));

    if (token.empty()) {
        if (auto env = process_env("STRATA_BEARER_TOKEN")) token = *env;
    }
    ServiceOptions options;
    options.data_dir = data_dir;
    if (!token.empty()) options.bearer_token = token;
    std::filesystem::create_directories(options.data_dir);
    Service service(engine, options);

    HttpServer server(service);
    const auto [host, port] = parse_listen_address(listen);
    const int bound = server.bind(host, port);
    spdlog::info("strata listening on {}:{} (provider={}, data_dir={})", host, bound, provider->name(), data_dir);

    // Server::stop only swaps and closes the listening socket.
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen();
    g_server = nullptr;
    spdlog::info("strata stopped");
    return 0;
}

int run_inspect(const std::string& config_path, const std::string& data_dir, const std::string& user,
                const std::string& tier_name, std::optional<Timestamp> now) {
    const Config config = load_config(config_path);
    const auto tier = tier_from_string(tier_name);
    if (!tier) throw_invalid_argument("tier must be one of stm, mtm, lpm");
    if (!is_valid_user_id(user)) throw_invalid_argument("invalid user id '" + user + "'");
    const MemorySnapshot snapshot = load(snapshot_path(data_dir, user));
    const MemoryState& state = snapshot.state;
    Json dump;
    switch (*tier) {
    case Tier::stm: dump = dump_stm(state); break;
    case Tier::mtm: dump = dump_mtm(state, now.value_or(state.clock), config.heat); break;
    case Tier::lpm: dump = dump_lpm(state); break;
    }
    std::cout << dump.dump(2) << "\n";
    return 0;
}

int run_replay(const CommonOptions& common, const std::string& transcript_path, const std::string& report_path,
               const std::string& snapshot_out, const std::string& user) {
    const Config config = load_config(common.config_path);
    auto provider = make_provider(common.provider, config);
    Engine engine(config, *provider, make_template(common.prompt_template));
    const Transcript transcript = load_transcript(transcript_path);

    ReplayResult result = replay(transcript, engine, user);
    const std::string report = report_to_json(result.report).dump(2) + "\n";
    if (report_path.empty() || report_path == "-") {
        std::cout << report;
    } else {
        write_file(report_path, report);
    }
    if (!snapshot_out.empty()) {
        write_file(snapshot_out, encode_snapshot(MemorySnapshot{kSnapshotVersion, result.state, result.state.clock}));
    }
    const auto& r = result.report;
    spdlog::info("replayed {} exchanges, {} answers: F1 {:.4f}, BLEU-1 {:.4f}, {:.2f} calls/respond", r.exchanges,
                 r.answers.size(), r.overall.f1, r.overall.bleu1, r.avg_calls_per_respond);
    return 0;
}

int run_wipe(const std::string& data_dir, const std::string& user) {
    if (!is_valid_user_id(user)) throw_invalid_argument("invalid user id '" + user + "'");
    const bool removed = wipe_user(data_dir, user);
    std::cout << (removed ? "removed " : "nothing stored for ") << user << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"strata: tiered conversational memory engine"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();

    CommonOptions common;
    auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "JSON config file (defaults apply when omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--provider", common.provider, "stub or remote")
            ->check(CLI::IsMember({"stub", "remote"}))
            ->capture_default_str();
        sub->add_option("--prompt-template", common.prompt_template, "prompt template file")->check(CLI::ExistingFile);
    };

    std::string data_dir = "data";
    std::string listen = "127.0.0.1:8080";
    std::string token;
    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    add_common(serve);
    serve->add_option("--data-dir", data_dir, "directory holding per-user snapshots")->capture_default_str();
    serve->add_option("--listen", listen, "host:port to bind")->capture_default_str();
    serve->add_option("--token", token, "require this bearer token (or set STRATA_BEARER_TOKEN)");

    std::string user;
    std::string tier = "mtm";
    std::optional<Timestamp> now;
    std::string inspect_config;
    auto* inspect = app.add_subcommand("inspect", "print one memory tier of a stored user");
    inspect->add_option("--config", inspect_config, "config file (heat weights)")->check(CLI::ExistingFile);
    inspect->add_option("--data-dir", data_dir)->capture_default_str();
    inspect->add_option("--user", user)->required();
    inspect->add_option("--tier", tier, "stm, mtm or lpm")->check(CLI::IsMember({"stm", "mtm", "lpm"}))
        ->capture_default_str();
    inspect->add_option("--now", now, "timestamp for heat (defaults to the memory clock)");

    std::string transcript;
    std::string report;
    std::string snapshot_out;
    std::string replay_user = "replay";
    auto* replay_cmd = app.add_subcommand("replay", "replay a JSONL transcript and score the answers");
    add_common(replay_cmd);
    replay_cmd->add_option("--transcript", transcript)->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--report", report, "write the JSON report here ('-' for stdout)");
    replay_cmd->add_option("--snapshot-out", snapshot_out, "write the final memory snapshot here");
    replay_cmd->add_option("--user", replay_user)->capture_default_str();

    auto* wipe = app.add_subcommand("wipe", "delete a stored user");
    wipe->add_option("--data-dir", data_dir)->capture_default_str();
    wipe->add_option("--user", user)->required();

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::from_str(log_level));
    try {
        if (*serve) return run_serve(common, data_dir, listen, token);
        if (*inspect) return run_inspect(inspect_config, data_dir, user, tier, now);
        if (*replay_cmd) return run_replay(common, transcript, report, snapshot_out, replay_user);
        if (*wipe) return run_wipe(data_dir, user);
    } catch (const ValidationError& e) {
        spdlog::error("invalid configuration: {}", e.what());
        return 2;
    } catch (const Error& e) {
        spdlog::error("{}: {}", to_string(e.code()), e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
