#include "strata/text.hpp"

#include <cctype>
#include <cstdio>

namespace strata::text {
namespace {

bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

} // namespace

std::vector<std::string> alnum_tokens(std::string_view input) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : input) {
        if (is_ascii_alnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string_view> whitespace_tokens(std::string_view input) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < input.size()) {
        while (i < input.size() && is_space(static_cast<unsigned char>(input[i]))) ++i;
        std::size_t start = i;
        while (i < input.size() && !is_space(static_cast<unsigned char>(input[i]))) ++i;
        if (i > start) tokens.push_back(input.substr(start, i - start));
    }
    return tokens;
}

std::size_t count_whitespace_tokens(std::string_view input) {
    std::size_t count = 0;
    bool in_token = false;
    for (unsigned char c : input) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

std::string_view trim(std::string_view input) {
    std::size_t begin = 0;
    std::size_t end = input.size();
    while (begin < end && is_space(static_cast<unsigned char>(input[begin]))) ++begin;
    while (end > begin && is_space(static_cast<unsigned char>(input[end - 1]))) --end;
    return input.substr(begin, end - begin);
}

std::string_view first_sentence(std::string_view input) {
    std::string_view trimmed = trim(input);
    std::size_t pos = trimmed.find_first_of(".!?");
    if (pos == std::string_view::npos) return trimmed;
    return trim(trimmed.substr(0, pos + 1));
}

std::string utf8_truncate(std::string_view input, std::size_t max_bytes) {
    if (input.size() <= max_bytes) return std::string(input);
    std::size_t cut = max_bytes;
    // Back off over continuation bytes (10xxxxxx) so the cut lands on a boundary.
    while (cut > 0 && (static_cast<unsigned char>(input[cut]) & 0xC0) == 0x80) --cut;
    return std::string(input.substr(0, cut));
}

std::uint64_t fnv1a64(std::string_view input) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : input) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex_digest(std::string_view input) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(input)));
    return std::string(buf, 16);
}

std::string to_lower(std::string_view input) {
    std::string out(input);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace strata::text
