#pragma once

#include "strata/config.hpp"
#include "strata/types.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace strata {

enum class ProviderTask {
    embed,
    extract_keywords,
    judge_continuity,
    summarize,
    extract_persona_updates,
    complete,
};

std::string_view to_string(ProviderTask task);

enum class SummaryKind { chain_meta, segment_summary };

std::string_view to_string(SummaryKind kind);

struct TraitUpdate {
    std::string value;
    double confidence = 1.0;

    friend bool operator==(const TraitUpdate&, const TraitUpdate&) = default;
};

struct PersonaUpdates {
    std::map<std::string, TraitUpdate> user_traits;
    std::vector<std::string> user_facts;
    std::vector<std::string> agent_facts;

    friend bool operator==(const PersonaUpdates&, const PersonaUpdates&) = default;
};

struct ProviderCall {
    ProviderTask task = ProviderTask::embed;
    std::string input_digest;
    std::string output_digest;  // empty when the call failed
    double latency_ms = 0.0;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    bool ok = true;
};

struct ProviderUsage {
    std::size_t calls = 0;
    std::size_t failed_calls = 0;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
};

// Append-only, internally synchronized.
class ProviderLog {
public:
    void append(ProviderCall call);
    std::vector<ProviderCall> entries() const;
    std::size_t size() const;
    ProviderUsage usage() const;

private:
    mutable std::mutex mutex_;
    std::vector<ProviderCall> entries_;
};

// While alive, receives a copy of every top-level provider call made on the
// current thread. Used for per-request accounting when one provider instance
// is shared by concurrent sessions.
class ProviderCallScope {
public:
    ProviderCallScope();
    ~ProviderCallScope();
    ProviderCallScope(const ProviderCallScope&) = delete;
    ProviderCallScope& operator=(const ProviderCallScope&) = delete;

    const ProviderLog& log() const noexcept { return log_; }
    ProviderUsage usage() const { return log_.usage(); }

private:
    friend class Provider;
    ProviderLog log_;
};

// Token counts a backend may report for one call. Unset counts fall back to
// whitespace token counts of the input and output text.
struct CallMeter {
    std::optional<std::uint64_t> input_tokens;
    std::optional<std::uint64_t> output_tokens;
};

// Gateway for the embedding model and every LLM sub-task. The public methods
// check pre/postconditions and record exactly one ProviderLog entry per call;
// backends implement the do_* hooks. Implementations must be safe to call
// concurrently.
class Provider {
public:
    virtual ~Provider() = default;

    Embedding embed(std::string_view text);
    KeywordSet extract_keywords(std::string_view text);
    bool judge_continuity(const DialoguePage& page, std::string_view chain_tail_meta);
    std::string summarize(SummaryKind kind, std::span<const std::string> texts);
    PersonaUpdates extract_persona_updates(const Segment& segment, const TraitSchema& schema);
    std::string complete(std::string_view prompt);

    virtual std::size_t dimension() const = 0;
    virtual std::string_view name() const = 0;

    const ProviderLog& log() const noexcept { return log_; }

protected:
    virtual Embedding do_embed(std::string_view text, CallMeter& meter) = 0;
    virtual KeywordSet do_extract_keywords(std::string_view text, CallMeter& meter) = 0;
    virtual bool do_judge_continuity(const DialoguePage& page, std::string_view chain_tail_meta,
                                     CallMeter& meter) = 0;
    virtual std::string do_summarize(SummaryKind kind, std::span<const std::string> texts,
                                     CallMeter& meter) = 0;
    virtual PersonaUpdates do_extract_persona_updates(const Segment& segment, const TraitSchema& schema,
                                                      CallMeter& meter) = 0;
    virtual std::string do_complete(std::string_view prompt, CallMeter& meter) = 0;

private:
    template <class Fn>
    auto record(ProviderTask task, const std::string& input, Fn&& fn);

    ProviderLog log_;
};

// Deterministic offline provider:
//   embed       hashed bag of words, each token adds 1.0 at fnv1a(token) mod dim
//   keywords    alphanumeric tokens longer than 2 chars, minus stopwords, first 32
//   continuity  Jaccard(keywords(page), keywords(meta)) >= 0.2
//   summarize   first sentence of each text joined by spaces, max 512 bytes
//   persona     "user said: <query>" / "agent said: <response>" per page, no traits
//   complete    "STUB-RESPONSE(" + first 64 bytes of the prompt + ")"
class StubProvider final : public Provider {
public:
    static constexpr std::size_t kDefaultDimension = 256;
    static constexpr std::size_t kMaxKeywords = 32;
    static constexpr std::size_t kMaxSummaryBytes = 512;
    static constexpr std::size_t kEchoBytes = 64;
    static constexpr double kContinuityThreshold = 0.2;

    explicit StubProvider(std::size_t dimension = kDefaultDimension);

    std::size_t dimension() const override { return dimension_; }
    std::string_view name() const override { return "stub"; }

    static const std::set<std::string>& stopwords();
    static KeywordSet keywords_of(std::string_view text);

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
    std::size_t dimension_;
};

} // namespace strata
