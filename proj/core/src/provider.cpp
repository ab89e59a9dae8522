#include "strata/provider.hpp"

#include "strata/error.hpp"
#include "strata/text.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

namespace strata {
namespace {

thread_local std::vector<ProviderLog*> active_scopes;
// Nesting depth of provider calls on this thread; decorators forwarding to an
// inner provider only count once towards scopes.
thread_local int call_depth = 0;

std::string digest_of(const Embedding& v) {
    std::string bytes(v.size() * sizeof(double), '\0');
    if (!v.empty()) std::memcpy(bytes.data(), v.data(), bytes.size());
    return text::hex_digest(bytes);
}

std::string joined(const KeywordSet& set) {
    std::string out;
    for (const auto& k : set) {
        if (!out.empty()) out.push_back(' ');
        out += k;
    }
    return out;
}

std::string digest_of(const PersonaUpdates& updates) {
    std::string flat;
    for (const auto& [k, v] : updates.user_traits) flat += k + "=" + v.value + "\x1f";
    for (const auto& f : updates.user_facts) flat += f + "\x1e";
    for (const auto& f : updates.agent_facts) flat += f + "\x1d";
    return text::hex_digest(flat);
}

std::uint64_t output_tokens_of(const Embedding&) { return 0; }
std::uint64_t output_tokens_of(const KeywordSet& set) { return set.size(); }
std::uint64_t output_tokens_of(bool) { return 1; }
std::uint64_t output_tokens_of(const std::string& s) { return text::count_whitespace_tokens(s); }
std::uint64_t output_tokens_of(const PersonaUpdates& u) {
    std::uint64_t n = 0;
    for (const auto& [k, v] : u.user_traits) n += 1 + text::count_whitespace_tokens(v.value);
    for (const auto& f : u.user_facts) n += text::count_whitespace_tokens(f);
    for (const auto& f : u.agent_facts) n += text::count_whitespace_tokens(f);
    return n;
}

std::string output_digest(const Embedding& v) { return digest_of(v); }
std::string output_digest(const KeywordSet& s) { return text::hex_digest(joined(s)); }
std::string output_digest(bool b) { return b ? "true" : "false"; }
std::string output_digest(const std::string& s) { return text::hex_digest(s); }
std::string output_digest(const PersonaUpdates& u) { return digest_of(u); }

} // namespace

std::string_view to_string(ProviderTask task) {
    switch (task) {
    case ProviderTask::embed: return "embed";
    case ProviderTask::extract_keywords: return "extract_keywords";
    case ProviderTask::judge_continuity: return "judge_continuity";
    case ProviderTask::summarize: return "summarize";
    case ProviderTask::extract_persona_updates: return "extract_persona_updates";
    case ProviderTask::complete: return "complete";
    }
    return "unknown";
}

std::string_view to_string(SummaryKind kind) {
    return kind == SummaryKind::chain_meta ? "chain_meta" : "segment_summary";
}

void ProviderLog::append(ProviderCall call) {
    std::lock_guard lock(mutex_);
    entries_.push_back(std::move(call));
}

std::vector<ProviderCall> ProviderLog::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::size_t ProviderLog::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

ProviderUsage ProviderLog::usage() const {
    std::lock_guard lock(mutex_);
    ProviderUsage usage;
    for (const auto& call : entries_) {
        ++usage.calls;
        if (!call.ok) ++usage.failed_calls;
        usage.input_tokens += call.input_tokens;
        usage.output_tokens += call.output_tokens;
    }
    return usage;
}

ProviderCallScope::ProviderCallScope() { active_scopes.push_back(&log_); }

ProviderCallScope::~ProviderCallScope() {
    auto it = std::find(active_scopes.begin(), active_scopes.end(), &log_);
    if (it != active_scopes.end()) active_scopes.erase(it);
}

template <class Fn>
auto Provider::record(ProviderTask task, const std::string& input, Fn&& fn) {
    ProviderCall call;
    call.task = task;
    call.input_digest = text::hex_digest(input);
    CallMeter meter;
    const bool top_level = call_depth == 0;
    const auto started = std::chrono::steady_clock::now();

    auto finish = [&](bool ok) {
        call.ok = ok;
        call.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        call.input_tokens = meter.input_tokens.value_or(text::count_whitespace_tokens(input));
        if (top_level) {
            for (ProviderLog* scope : active_scopes) scope->append(call);
        }
        log_.append(std::move(call));
    };

    ++call_depth;
    try {
        auto result = fn(meter);
        --call_depth;
        call.output_digest = output_digest(result);
        call.output_tokens = meter.output_tokens.value_or(output_tokens_of(result));
        finish(true);
        return result;
    } catch (...) {
        --call_depth;
        finish(false);
        throw;
    }
}

Embedding Provider::embed(std::string_view text) {
    return record(ProviderTask::embed, std::string(text), [&](CallMeter& meter) {
        Embedding v = do_embed(text, meter);
        if (v.size() != dimension()) {
            throw ProviderUnavailable("provider " + std::string(name()) + " returned embedding of dimension " +
                                      std::to_string(v.size()) + ", expected " + std::to_string(dimension()));
        }
        for (double x : v) {
            if (!std::isfinite(x)) throw ProviderUnavailable("provider returned a non-finite embedding value");
        }
        return v;
    });
}

KeywordSet Provider::extract_keywords(std::string_view text) {
    return record(ProviderTask::extract_keywords, std::string(text), [&](CallMeter& meter) {
        KeywordSet normalized;
        for (const auto& k : do_extract_keywords(text, meter)) {
            auto term = text::to_lower(text::trim(k));
            if (!term.empty()) normalized.insert(std::move(term));
        }
        return normalized;
    });
}

bool Provider::judge_continuity(const DialoguePage& page, std::string_view chain_tail_meta) {
    std::string input = page_text(page);
    input += "\x1f";
    input += chain_tail_meta;
    return record(ProviderTask::judge_continuity, input, [&](CallMeter& meter) {
        if (text::trim(chain_tail_meta).empty()) return false;
        return do_judge_continuity(page, chain_tail_meta, meter);
    });
}

std::string Provider::summarize(SummaryKind kind, std::span<const std::string> texts) {
    std::string input(to_string(kind));
    for (const auto& t : texts) {
        input += "\x1e";
        input += t;
    }
    return record(ProviderTask::summarize, input, [&](CallMeter& meter) {
        if (texts.empty()) throw_invalid_argument("summarize requires at least one text");
        std::string summary(text::trim(do_summarize(kind, texts, meter)));
        if (summary.empty()) throw ProviderUnavailable("provider returned an empty summary");
        return summary;
    });
}

PersonaUpdates Provider::extract_persona_updates(const Segment& segment, const TraitSchema& schema) {
    std::string input = std::to_string(segment.id.value);
    for (const auto& page : segment.pages) {
        input += "\x1e";
        input += page_text(page);
    }
    return record(ProviderTask::extract_persona_updates, input, [&](CallMeter& meter) {
        if (segment.pages.empty()) throw_invalid_argument("cannot extract persona updates from an empty segment");
        PersonaUpdates raw = do_extract_persona_updates(segment, schema, meter);
        PersonaUpdates clean;
        for (auto& [dimension, update] : raw.user_traits) {
            if (!schema.contains(dimension)) {
                spdlog::warn("provider {} proposed trait '{}' outside the schema; dropped", name(), dimension);
                continue;
            }
            if (!std::isfinite(update.confidence)) update.confidence = 1.0;
            update.confidence = std::clamp(update.confidence, 0.0, 1.0);
            clean.user_traits.emplace(dimension, std::move(update));
        }
        for (auto& fact : raw.user_facts) {
            if (!text::trim(fact).empty()) clean.user_facts.push_back(std::move(fact));
        }
        for (auto& fact : raw.agent_facts) {
            if (!text::trim(fact).empty()) clean.agent_facts.push_back(std::move(fact));
        }
        return clean;
    });
}

std::string Provider::complete(std::string_view prompt) {
    return record(ProviderTask::complete, std::string(prompt), [&](CallMeter& meter) {
        if (prompt.empty()) throw_invalid_argument("prompt must not be empty");
        return do_complete(prompt, meter);
    });
}

} // namespace strata
