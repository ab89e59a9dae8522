#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace strata::text {

// Lowercased runs of ASCII letters and digits. Every other byte, including
// non-ASCII UTF-8 bytes, separates tokens.
std::vector<std::string> alnum_tokens(std::string_view input);

std::vector<std::string_view> whitespace_tokens(std::string_view input);
std::size_t count_whitespace_tokens(std::string_view input);

// Leading text up to and including the first '.', '!' or '?', trimmed.
// Returns the whole trimmed text when no terminator exists.
std::string_view first_sentence(std::string_view input);

std::string_view trim(std::string_view input);

// Truncates to at most max_bytes without splitting a UTF-8 code point.
std::string utf8_truncate(std::string_view input, std::size_t max_bytes);

std::uint64_t fnv1a64(std::string_view input);
std::string hex_digest(std::string_view input);

std::string to_lower(std::string_view input);

} // namespace strata::text
