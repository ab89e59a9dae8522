#pragma once

#include "strata/engine.hpp"
#include "strata/memory_state.hpp"
#include "strata/provider.hpp"
#include "strata/serialization.hpp"
#include "strata/transcript.hpp"

#include <map>
#include <string>
#include <vector>

namespace strata {

struct AnswerRecord {
    std::string question;
    std::string gold_answer;
    QaCategory category = QaCategory::single_hop;
    Timestamp timestamp = 0;
    std::string response;
    double f1 = 0.0;
    double bleu1 = 0.0;
    std::size_t recalled_tokens = 0;
    std::size_t provider_calls = 0;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
};

struct CategoryScore {
    std::size_t count = 0;
    double f1 = 0.0;     // mean
    double bleu1 = 0.0;  // mean
};

struct ReplayReport {
    std::size_t turns = 0;
    std::size_t exchanges = 0;
    std::vector<AnswerRecord> answers;
    std::map<std::string, CategoryScore> per_category;
    CategoryScore overall;
    double avg_calls_per_respond = 0.0;
    double avg_recalled_tokens = 0.0;
    ProviderUsage ingest_usage;
    ProviderUsage answer_usage;
    ProviderUsage total_usage;
};

struct ReplayResult {
    MemoryState state;
    ReplayReport report;
};

// Ingests every exchange in order, then answers each QA item with respond().
// Replay is strictly sequential; with the stub provider it is deterministic.
ReplayResult replay(const Transcript& transcript, const Engine& engine, const std::string& user_id = "replay");

Json report_to_json(const ReplayReport& report);

} // namespace strata
