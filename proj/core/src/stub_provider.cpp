#include "strata/error.hpp"
#include "strata/provider.hpp"
#include "strata/text.hpp"

namespace strata {

StubProvider::StubProvider(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw_invalid_argument("embedding dimension must be >= 1");
}

const std::set<std::string>& StubProvider::stopwords() {
    static const std::set<std::string> words = {
        "a", "about", "above", "after", "again", "all", "also", "am", "an", "and", "any", "are", "as",
        "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by",
        "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from",
        "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
        "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "me",
        "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "only",
        "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she", "should", "so",
        "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then",
        "there", "these", "they", "this", "those", "through", "to", "too", "under", "until", "up",
        "very", "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why",
        "will", "with", "would", "you", "your", "yours", "yourself", "yourselves"};
    return words;
}

KeywordSet StubProvider::keywords_of(std::string_view input) {
    KeywordSet out;
    const auto& stop = stopwords();
    for (auto& token : text::alnum_tokens(input)) {
        if (out.size() == kMaxKeywords) break;
        if (token.size() <= 2 || stop.contains(token)) continue;
        out.insert(std::move(token));
    }
    return out;
}

Embedding StubProvider::do_embed(std::string_view input, CallMeter&) {
    Embedding v(dimension_, 0.0);
    for (const auto& token : text::alnum_tokens(input)) {
        v[text::fnv1a64(token) % dimension_] += 1.0;
    }
    return v;
}

KeywordSet StubProvider::do_extract_keywords(std::string_view input, CallMeter&) {
    return keywords_of(input);
}

bool StubProvider::do_judge_continuity(const DialoguePage& page, std::string_view chain_tail_meta, CallMeter&) {
    return jaccard(keywords_of(page_text(page)), keywords_of(chain_tail_meta)) >= kContinuityThreshold;
}

std::string StubProvider::do_summarize(SummaryKind, std::span<const std::string> texts, CallMeter&) {
    std::string summary;
    for (const auto& t : texts) {
        std::string_view sentence = text::first_sentence(t);
        if (sentence.empty()) continue;
        if (!summary.empty()) summary.push_back(' ');
        summary += sentence;
    }
    if (summary.empty()) summary = "(no content)";
    return text::utf8_truncate(summary, kMaxSummaryBytes);
}

PersonaUpdates StubProvider::do_extract_persona_updates(const Segment& segment, const TraitSchema&, CallMeter&) {
    PersonaUpdates updates;
    for (const auto& page : segment.pages) {
        updates.user_facts.push_back("user said: " + page.query);
        updates.agent_facts.push_back("agent said: " + page.response);
    }
    return updates;
}

std::string StubProvider::do_complete(std::string_view prompt, CallMeter&) {
    return "STUB-RESPONSE(" + text::utf8_truncate(prompt, kEchoBytes) + ")";
}

} // namespace strata
