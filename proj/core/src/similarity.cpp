#include "strata/similarity.hpp"

#include "strata/error.hpp"

#include <algorithm>
#include <cmath>

namespace strata {

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw_invalid_argument("embedding dimension mismatch: " + std::to_string(a.size()) +
                               " vs " + std::to_string(b.size()));
    }
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        norm_a += a[i] * a[i];
        norm_b += b[i] * b[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)), -1.0, 1.0);
}

double jaccard(const KeywordSet& a, const KeywordSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    const std::size_t united = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(united);
}

} // namespace strata
