#include "strata/metrics.hpp"

#include "strata/text.hpp"

#include <cctype>
#include <cmath>
#include <map>

namespace strata::metrics {
namespace {

std::size_t multiset_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::map<std::string_view, std::size_t> counts;
    for (const auto& t : b) ++counts[t];
    std::size_t overlap = 0;
    for (const auto& t : a) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return overlap;
}

} // namespace

std::vector<std::string> tokenize(std::string_view input) {
    std::vector<std::string> tokens;
    for (std::string_view raw : text::whitespace_tokens(input)) {
        std::string token;
        for (unsigned char c : raw) {
            if (c < 0x80 && std::ispunct(c)) continue;
            token.push_back(static_cast<char>(std::tolower(c)));
        }
        if (!token.empty()) tokens.push_back(std::move(token));
    }
    return tokens;
}

double f1(std::string_view prediction, std::string_view gold) {
    const auto pred = tokenize(prediction);
    const auto ref = tokenize(gold);
    if (pred.empty() && ref.empty()) return 1.0;
    if (pred.empty() || ref.empty()) return 0.0;
    const auto overlap = static_cast<double>(multiset_overlap(pred, ref));
    if (overlap == 0.0) return 0.0;
    const double precision = overlap / static_cast<double>(pred.size());
    const double recall = overlap / static_cast<double>(ref.size());
    return 2.0 * precision * recall / (precision + recall);
}

double bleu1(std::string_view prediction, std::string_view gold) {
    const auto pred = tokenize(prediction);
    const auto ref = tokenize(gold);
    if (pred.empty()) return 0.0;
    const double precision = static_cast<double>(multiset_overlap(pred, ref)) / static_cast<double>(pred.size());
    const double brevity = pred.size() > ref.size()
                               ? 1.0
                               : std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(pred.size()));
    return precision * brevity;
}

} // namespace strata::metrics
