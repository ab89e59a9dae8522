#include "strata/remote_provider.hpp"

#include "strata/error.hpp"
#include "strata/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <regex>
#include <thread>

namespace strata {
namespace {

using nlohmann::json;

constexpr const char* kKeywordsPrompt =
    "Extract the key topical terms from the user's text. Reply with a JSON array of at most 32 "
    "lowercase keywords and nothing else.";

constexpr const char* kContinuityPrompt =
    "You decide whether a new dialogue turn continues the topic of an ongoing conversation chain. "
    "Reply with exactly one word: yes or no.";

constexpr const char* kChainSummaryPrompt =
    "Summarize the following consecutive dialogue turns into a short running context summary of at "
    "most three sentences. Keep names, dates and facts.";

constexpr const char* kSegmentSummaryPrompt =
    "The following dialogue pages share one topic. Summarize that topic in at most three sentences, "
    "keeping concrete facts.";

constexpr const char* kPersonaPrompt =
    "Read the dialogue pages below and extract persona information.\n"
    "1. user_traits: values for these trait dimensions only: {dimensions}. Omit dimensions without "
    "evidence. Each value is a short phrase with a confidence between 0 and 1.\n"
    "2. user_facts: factual statements about the user.\n"
    "3. agent_facts: facts about the assistant, such as settings the user gave it or items it "
    "recommended.\n"
    "Reply with JSON only: {\"user_traits\": {\"<dimension>\": {\"value\": \"...\", \"confidence\": 0.8}}, "
    "\"user_facts\": [\"...\"], \"agent_facts\": [\"...\"]}";

std::string strip_code_fence(std::string_view reply) {
    std::string_view s = text::trim(reply);
    if (s.starts_with("```")) {
        auto first_newline = s.find('\n');
        auto last_fence = s.rfind("```");
        if (first_newline != std::string_view::npos && last_fence > first_newline) {
            s = s.substr(first_newline + 1, last_fence - first_newline - 1);
        }
    }
    return std::string(text::trim(s));
}

json parse_reply_json(std::string_view reply, const char* what) {
    try {
        return json::parse(strip_code_fence(reply));
    } catch (const json::parse_error&) {
        throw ProviderUnavailable(std::string("remote model returned malformed JSON for ") + what);
    }
}

std::string dialogue_of(const Segment& segment) {
    std::string out;
    for (const auto& page : segment.pages) {
        out += "[t=" + std::to_string(page.timestamp) + "] User: " + page.query + "\n";
        out += "[t=" + std::to_string(page.timestamp) + "] Assistant: " + page.response + "\n";
    }
    return out;
}

} // namespace

RemoteProviderConfig RemoteProviderConfig::from_env(const EnvLookup& lookup, std::size_t dimension) {
    RemoteProviderConfig config;
    config.dimension = dimension;
    if (auto v = lookup("STRATA_PROVIDER_BASE_URL")) config.base_url = *v;
    if (auto v = lookup("STRATA_PROVIDER_API_KEY")) config.api_key = *v;
    if (auto v = lookup("STRATA_PROVIDER_MODEL")) config.model = *v;
    if (auto v = lookup("STRATA_PROVIDER_EMBEDDING_MODEL")) config.embedding_model = *v;
    try {
        if (auto v = lookup("STRATA_PROVIDER_TIMEOUT_MS")) config.timeout = std::chrono::milliseconds(std::stoll(*v));
        if (auto v = lookup("STRATA_PROVIDER_RETRIES")) config.retries = std::stoi(*v);
    } catch (const std::exception&) {
        throw ValidationError("provider", "STRATA_PROVIDER_TIMEOUT_MS / STRATA_PROVIDER_RETRIES must be integers");
    }
    return config;
}

RemoteProvider::RemoteProvider(RemoteProviderConfig config) : config_(std::move(config)) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch match;
    if (!std::regex_match(config_.base_url, match, url_re)) {
        throw ValidationError("provider.base_url", "expected http(s)://host[:port][/prefix], got '" +
                                                       config_.base_url + "'");
    }
    scheme_host_ = match[1].str();
    path_prefix_ = match[2].str();
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    if (config_.dimension == 0) throw ValidationError("embedding_dim", "must be >= 1");
    if (config_.retries < 0) throw ValidationError("provider.retries", "must be >= 0");
}

std::string RemoteProvider::post_json(const std::string& path, const std::string& body) {
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    auto backoff = config_.backoff;
    std::string last_error;

    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        // One client per call: httplib clients are not safe for concurrent use.
        httplib::Client client(scheme_host_);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());
        httplib::Headers headers;
        if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

        auto res = client.Post(path_prefix_ + path, headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            spdlog::warn("remote provider attempt {} failed: {}", attempt + 1, last_error);
            continue;
        }
        if (res->status >= 200 && res->status < 300) return res->body;
        last_error = "HTTP " + std::to_string(res->status) + ": " + text::utf8_truncate(res->body, 200);
        if (res->status == 429 || res->status >= 500) {
            spdlog::warn("remote provider attempt {} failed: {}", attempt + 1, last_error);
            continue;
        }
        break;  // 4xx other than 429 (bad key, bad request) will not improve on retry
    }
    throw ProviderUnavailable("remote provider " + scheme_host_ + path_prefix_ + path + " failed: " + last_error);
}

std::string RemoteProvider::chat(const std::string& system, const std::string& user, CallMeter& meter) {
    json body;
    body["model"] = config_.model;
    body["temperature"] = 0;
    body["messages"] = json::array();
    if (!system.empty()) body["messages"].push_back({{"role", "system"}, {"content", system}});
    body["messages"].push_back({{"role", "user"}, {"content", user}});

    const std::string raw = post_json("/chat/completions", body.dump());
    try {
        const json reply = json::parse(raw);
        if (reply.contains("usage") && reply["usage"].is_object()) {
            const auto& usage = reply["usage"];
            if (usage.contains("prompt_tokens")) meter.input_tokens = usage["prompt_tokens"].get<std::uint64_t>();
            if (usage.contains("completion_tokens")) {
                meter.output_tokens = usage["completion_tokens"].get<std::uint64_t>();
            }
        }
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProviderUnavailable(std::string("malformed chat completion reply: ") + e.what());
    }
}

Embedding RemoteProvider::do_embed(std::string_view input, CallMeter& meter) {
    // Embedding endpoints reject empty input; an empty text carries no signal.
    if (text::trim(input).empty()) return Embedding(config_.dimension, 0.0);
    json body;
    body["model"] = config_.embedding_model;
    body["input"] = std::string(input);
    if (config_.send_dimensions) body["dimensions"] = config_.dimension;
    const std::string raw = post_json("/embeddings", body.dump());
    try {
        const json reply = json::parse(raw);
        if (reply.contains("usage") && reply["usage"].contains("prompt_tokens")) {
            meter.input_tokens = reply["usage"]["prompt_tokens"].get<std::uint64_t>();
        }
        return reply.at("data").at(0).at("embedding").get<Embedding>();
    } catch (const json::exception& e) {
        throw ProviderUnavailable(std::string("malformed embedding reply: ") + e.what());
    }
}

KeywordSet RemoteProvider::do_extract_keywords(std::string_view input, CallMeter& meter) {
    if (text::trim(input).empty()) return {};
    const std::string reply = chat(kKeywordsPrompt, std::string(input), meter);
    KeywordSet out;
    try {
        const json parsed = json::parse(strip_code_fence(reply));
        if (!parsed.is_array()) throw ProviderUnavailable("keyword reply is not a JSON array");
        for (const auto& item : parsed) {
            if (item.is_string()) out.insert(item.get<std::string>());
        }
    } catch (const json::parse_error&) {
        // Tolerate plain comma/newline separated lists.
        std::string current;
        for (char c : reply) {
            if (c == ',' || c == '\n') {
                if (!text::trim(current).empty()) out.insert(std::string(text::trim(current)));
                current.clear();
            } else {
                current.push_back(c);
            }
        }
        if (!text::trim(current).empty()) out.insert(std::string(text::trim(current)));
    }
    return out;
}

bool RemoteProvider::do_judge_continuity(const DialoguePage& page, std::string_view chain_tail_meta,
                                         CallMeter& meter) {
    const std::string user = "Chain summary:\n" + std::string(chain_tail_meta) + "\n\nNew turn:\nUser: " +
                             page.query + "\nAssistant: " + page.response;
    const std::string reply = text::to_lower(text::trim(chat(kContinuityPrompt, user, meter)));
    if (reply.starts_with("yes")) return true;
    if (reply.starts_with("no")) return false;
    throw ProviderUnavailable("continuity reply was neither yes nor no");
}

std::string RemoteProvider::do_summarize(SummaryKind kind, std::span<const std::string> texts, CallMeter& meter) {
    std::string user;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        user += "Page " + std::to_string(i + 1) + ":\n" + texts[i] + "\n\n";
    }
    return chat(kind == SummaryKind::chain_meta ? kChainSummaryPrompt : kSegmentSummaryPrompt, user, meter);
}

PersonaUpdates RemoteProvider::do_extract_persona_updates(const Segment& segment, const TraitSchema& schema,
                                                          CallMeter& meter) {
    std::string dimensions;
    for (const auto& category : schema.categories) {
        for (const auto& dim : category.dimensions) {
            if (!dimensions.empty()) dimensions += ", ";
            dimensions += dim;
        }
    }
    std::string system = kPersonaPrompt;
    system.replace(system.find("{dimensions}"), std::string_view("{dimensions}").size(), dimensions);
    const std::string user = "Topic summary: " + segment.summary + "\n\nDialogue:\n" + dialogue_of(segment);
    const json reply = parse_reply_json(chat(system, user, meter), "persona extraction");

    PersonaUpdates updates;
    try {
        if (reply.contains("user_traits") && reply["user_traits"].is_object()) {
            for (const auto& [dimension, value] : reply["user_traits"].items()) {
                TraitUpdate update;
                if (value.is_string()) {
                    update.value = value.get<std::string>();
                } else {
                    update.value = value.at("value").get<std::string>();
                    if (value.contains("confidence")) update.confidence = value["confidence"].get<double>();
                }
                updates.user_traits[dimension] = std::move(update);
            }
        }
        for (const char* key : {"user_facts", "agent_facts"}) {
            if (!reply.contains(key)) continue;
            auto& target = std::string_view(key) == "user_facts" ? updates.user_facts : updates.agent_facts;
            for (const auto& fact : reply[key]) target.push_back(fact.get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ProviderUnavailable(std::string("malformed persona reply: ") + e.what());
    }
    return updates;
}

std::string RemoteProvider::do_complete(std::string_view prompt, CallMeter& meter) {
    return chat("", std::string(prompt), meter);
}

} // namespace strata
