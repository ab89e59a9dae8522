#pragma once

#include <set>
#include <span>
#include <string>

namespace strata {

using KeywordSet = std::set<std::string>;

// Cosine similarity clamped to [-1, 1]. A zero vector on either side yields 0
// (no semantic evidence). Throws invalid_argument on dimension mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

// |a ∩ b| / |a ∪ b|; two empty sets give 0 so empty keyword sets never merge.
double jaccard(const KeywordSet& a, const KeywordSet& b);

} // namespace strata
