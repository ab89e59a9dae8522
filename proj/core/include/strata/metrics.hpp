#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace strata::metrics {

// Lowercased whitespace tokens with ASCII punctuation removed; tokens that
// end up empty are dropped.
std::vector<std::string> tokenize(std::string_view text);

// Token-level F1 with multiset overlap. 1 when both sides are empty, 0 when
// exactly one is.
double f1(std::string_view prediction, std::string_view gold);

// Clipped unigram precision times brevity penalty
// (1 if |pred| > |gold|, else exp(1 - |gold| / |pred|)); 0 for an empty prediction.
double bleu1(std::string_view prediction, std::string_view gold);

} // namespace strata::metrics
