#include "strata/replay.hpp"

#include "strata/metrics.hpp"

#include <algorithm>

namespace strata {
namespace {

void accumulate(ProviderUsage& into, const ProviderUsage& from) {
    into.calls += from.calls;
    into.failed_calls += from.failed_calls;
    into.input_tokens += from.input_tokens;
    into.output_tokens += from.output_tokens;
}

Json usage_to_json(const ProviderUsage& usage) {
    Json out;
    out["calls"] = usage.calls;
    out["failed_calls"] = usage.failed_calls;
    out["input_tokens"] = usage.input_tokens;
    out["output_tokens"] = usage.output_tokens;
    return out;
}

Json score_to_json(const CategoryScore& score) {
    Json out;
    out["count"] = score.count;
    out["f1"] = score.f1;
    out["bleu1"] = score.bleu1;
    return out;
}

} // namespace

ReplayResult replay(const Transcript& transcript, const Engine& engine, const std::string& user_id) {
    ReplayResult result{engine.new_memory(user_id), {}};
    MemoryState& state = result.state;
    ReplayReport& report = result.report;
    report.turns = transcript.turns.size();
    report.exchanges = transcript.exchanges.size();

    {
        ProviderCallScope scope;
        for (const auto& exchange : transcript.exchanges) {
            engine.ingest(state, exchange.query, exchange.response, std::max(exchange.timestamp, state.clock));
        }
        report.ingest_usage = scope.usage();
    }

    std::map<std::string, std::pair<double, double>> sums;
    double f1_sum = 0.0;
    double bleu_sum = 0.0;
    std::size_t recalled_sum = 0;
    for (const auto& item : transcript.qa_items) {
        const Timestamp now = item.timestamp ? std::max(*item.timestamp, state.clock) : state.clock + 1;
        ProviderCallScope scope;
        RespondResult answer = engine.respond(state, item.question, now);
        const ProviderUsage usage = scope.usage();
        accumulate(report.answer_usage, usage);

        AnswerRecord record;
        record.question = item.question;
        record.gold_answer = item.gold_answer;
        record.category = item.category;
        record.timestamp = now;
        record.response = answer.response;
        record.f1 = metrics::f1(answer.response, item.gold_answer);
        record.bleu1 = metrics::bleu1(answer.response, item.gold_answer);
        record.recalled_tokens = recalled_tokens(answer.bundle);
        record.provider_calls = usage.calls;
        record.input_tokens = usage.input_tokens;
        record.output_tokens = usage.output_tokens;

        auto& category = report.per_category[std::string(to_string(item.category))];
        category.count += 1;
        auto& [f1_cat, bleu_cat] = sums[std::string(to_string(item.category))];
        f1_cat += record.f1;
        bleu_cat += record.bleu1;
        f1_sum += record.f1;
        bleu_sum += record.bleu1;
        recalled_sum += record.recalled_tokens;
        report.answers.push_back(std::move(record));
    }

    for (auto& [name, score] : report.per_category) {
        score.f1 = sums[name].first / static_cast<double>(score.count);
        score.bleu1 = sums[name].second / static_cast<double>(score.count);
    }
    const std::size_t answered = report.answers.size();
    report.overall.count = answered;
    if (answered > 0) {
        report.overall.f1 = f1_sum / static_cast<double>(answered);
        report.overall.bleu1 = bleu_sum / static_cast<double>(answered);
        report.avg_calls_per_respond = static_cast<double>(report.answer_usage.calls) / static_cast<double>(answered);
        report.avg_recalled_tokens = static_cast<double>(recalled_sum) / static_cast<double>(answered);
    }
    report.total_usage = report.ingest_usage;
    accumulate(report.total_usage, report.answer_usage);
    return result;
}

Json report_to_json(const ReplayReport& report) {
    Json out;
    out["version"] = 1;
    out["turns"] = report.turns;
    out["exchanges"] = report.exchanges;
    out["questions"] = report.answers.size();
    Json answers = Json::array();
    for (const auto& a : report.answers) {
        Json entry;
        entry["question"] = a.question;
        entry["gold_answer"] = a.gold_answer;
        entry["category"] = to_string(a.category);
        entry["timestamp"] = a.timestamp;
        entry["response"] = a.response;
        entry["f1"] = a.f1;
        entry["bleu1"] = a.bleu1;
        entry["recalled_tokens"] = a.recalled_tokens;
        entry["provider_calls"] = a.provider_calls;
        entry["input_tokens"] = a.input_tokens;
        entry["output_tokens"] = a.output_tokens;
        answers.push_back(std::move(entry));
    }
    out["answers"] = std::move(answers);
    Json categories = Json::object();
    for (const auto& [name, score] : report.per_category) categories[name] = score_to_json(score);
    out["per_category"] = std::move(categories);
    out["overall"] = score_to_json(report.overall);
    out["avg_calls_per_respond"] = report.avg_calls_per_respond;
    out["avg_recalled_tokens"] = report.avg_recalled_tokens;
    out["ingest_usage"] = usage_to_json(report.ingest_usage);
    out["answer_usage"] = usage_to_json(report.answer_usage);
    out["total_usage"] = usage_to_json(report.total_usage);
    return out;
}

} // namespace strata
