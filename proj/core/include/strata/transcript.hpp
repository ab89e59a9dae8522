#pragma once

#include "strata/types.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace strata {

enum class QaCategory { single_hop, multi_hop, temporal, open_domain };

std::string_view to_string(QaCategory category);
std::optional<QaCategory> qa_category_from_string(std::string_view name);

struct Turn {
    std::string speaker;  // "user" or "agent"
    std::string text;
    Timestamp timestamp = 0;
};

struct QaItem {
    std::string question;
    std::string gold_answer;
    QaCategory category = QaCategory::single_hop;
    std::optional<Timestamp> timestamp;
};

// A user turn followed by its agent reply. A user turn with no reply yields
// an exchange with an empty response.
struct Exchange {
    std::string query;
    std::string response;
    Timestamp timestamp = 0;
};

struct Transcript {
    std::vector<Turn> turns;
    std::vector<Exchange> exchanges;
    std::vector<QaItem> qa_items;
};

inline constexpr std::string_view kTranscriptSchema = "strata-transcript";
inline constexpr int kTranscriptVersion = 1;

// JSONL: a header line {"schema":"strata-transcript","version":1}, then one
// {"type":"turn",...} or {"type":"qa",...} object per line. Errors are
// Error(parse) carrying "<source>:<line>".
Transcript parse_transcript(std::istream& in, const std::string& source = "<transcript>");
Transcript load_transcript(const std::filesystem::path& path);

} // namespace strata
