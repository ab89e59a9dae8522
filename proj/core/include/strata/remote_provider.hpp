#pragma once

#include "strata/config.hpp"
#include "strata/provider.hpp"

#include <chrono>
#include <string>

namespace strata {

// Prompts sent to the remote model are versioned together; bump when any
// template text changes.
inline constexpr int kRemotePromptVersion = 1;

struct RemoteProviderConfig {
    std::string base_url;  // including the API prefix, e.g. https://api.openai.com/v1
    std::string api_key;
    std::string model = "gpt-4o-mini";
    std::string embedding_model = "text-embedding-3-small";
    std::size_t dimension = 256;
    bool send_dimensions = true;  // pass "dimensions" in embedding requests
    std::chrono::milliseconds timeout{30'000};
    int retries = 2;
    std::chrono::milliseconds backoff{500};  // doubled after every failed attempt

    // STRATA_PROVIDER_BASE_URL, STRATA_PROVIDER_API_KEY, STRATA_PROVIDER_MODEL,
    // STRATA_PROVIDER_EMBEDDING_MODEL, STRATA_PROVIDER_TIMEOUT_MS,
    // STRATA_PROVIDER_RETRIES.
    static RemoteProviderConfig from_env(const EnvLookup& lookup, std::size_t dimension);
};

// Provider backed by an OpenAI-compatible HTTP API (/chat/completions and
// /embeddings). Transport, authentication and malformed replies surface as
// ProviderUnavailable.
class RemoteProvider final : public Provider {
public:
    explicit RemoteProvider(RemoteProviderConfig config);

    std::size_t dimension() const override { return config_.dimension; }
    std::string_view name() const override { return "remote"; }

protected:
    Embedding do_embed(std::string_view text, CallMeter& meter) override;
    KeywordSet do_extract_keywords(std::string_view text, CallMeter& meter) override;
    bool do_judge_continuity(const DialoguePage& page, std::string_view chain_tail_meta,
                             CallMeter& meter) override;
    std::string do_summarize(SummaryKind kind, std::span<const std::string> texts, CallMeter& meter) override;
    PersonaUpdates do_extract_persona_updates(const Segment& segment, const TraitSchema& schema,
                                              CallMeter& meter) override;
    std::string do_complete(std::string_view prompt, CallMeter& meter) override;

private:
    std::string chat(const std::string& system, const std::string& user, CallMeter& meter);
    std::string post_json(const std::string& path, const std::string& body);

    RemoteProviderConfig config_;
    std::string scheme_host_;
    std::string path_prefix_;
};

} // namespace strata
