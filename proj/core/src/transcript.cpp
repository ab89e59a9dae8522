#include "strata/transcript.hpp"

#include "strata/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace strata {

std::string_view to_string(QaCategory category) {
    switch (category) {
    case QaCategory::single_hop: return "single_hop";
    case QaCategory::multi_hop: return "multi_hop";
    case QaCategory::temporal: return "temporal";
    case QaCategory::open_domain: return "open_domain";
    }
    return "unknown";
}

std::optional<QaCategory> qa_category_from_string(std::string_view name) {
    if (name == "single_hop") return QaCategory::single_hop;
    if (name == "multi_hop") return QaCategory::multi_hop;
    if (name == "temporal") return QaCategory::temporal;
    if (name == "open_domain") return QaCategory::open_domain;
    return std::nullopt;
}

Transcript parse_transcript(std::istream& in, const std::string& source) {
    Transcript transcript;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::optional<Turn> open_user_turn;
    Timestamp last_timestamp = 0;

    auto fail = [&](const std::string& what) -> void {
        throw Error(ErrorCode::parse, source + ":" + std::to_string(line_no) + ": " + what);
    };
    auto close_open_turn = [&]() {
        if (open_user_turn) {
            transcript.exchanges.push_back({open_user_turn->text, "", open_user_turn->timestamp});
            open_user_turn.reset();
        }
    };
    auto string_field = [&](const nlohmann::json& doc, const char* key) {
        auto it = doc.find(key);
        if (it == doc.end() || !it->is_string()) fail(std::string("\"") + key + "\" must be a string");
        return it->get<std::string>();
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(std::string("malformed JSON: ") + e.what());
        }
        if (!doc.is_object()) fail("expected a JSON object");

        if (!saw_header) {
            if (doc.value("schema", "") != kTranscriptSchema) fail("first line must be the transcript header");
            if (!doc.contains("version") || !doc["version"].is_number_integer() ||
                doc["version"].get<int>() != kTranscriptVersion) {
                fail("unsupported transcript version");
            }
            saw_header = true;
            continue;
        }

        const std::string type = string_field(doc, "type");
        if (type == "turn") {
            Turn turn;
            turn.speaker = string_field(doc, "speaker");
            turn.text = string_field(doc, "text");
            auto ts = doc.find("timestamp");
            if (ts == doc.end() || !ts->is_number_integer()) fail("\"timestamp\" must be an integer");
            turn.timestamp = ts->get<Timestamp>();
            if (turn.timestamp < 0) fail("timestamp must be >= 0");
            if (turn.timestamp < last_timestamp) fail("timestamps must be non-decreasing");
            last_timestamp = turn.timestamp;

            if (turn.speaker == "user") {
                if (turn.text.empty()) fail("user turn text must not be empty");
                close_open_turn();
                open_user_turn = turn;
            } else if (turn.speaker == "agent") {
                if (!open_user_turn) fail("agent turn without a preceding user turn");
                transcript.exchanges.push_back({open_user_turn->text, turn.text, open_user_turn->timestamp});
                open_user_turn.reset();
            } else {
                fail("speaker must be \"user\" or \"agent\"");
            }
            transcript.turns.push_back(std::move(turn));
        } else if (type == "qa") {
            QaItem item;
            item.question = string_field(doc, "question");
            item.gold_answer = string_field(doc, "answer");
            if (item.question.empty()) fail("question must not be empty");
            auto category = qa_category_from_string(string_field(doc, "category"));
            if (!category) fail("category must be one of single_hop, multi_hop, temporal, open_domain");
            item.category = *category;
            auto ts = doc.find("timestamp");
            if (ts != doc.end()) {
                if (!ts->is_number_integer()) fail("\"timestamp\" must be an integer");
                item.timestamp = ts->get<Timestamp>();
            }
            transcript.qa_items.push_back(std::move(item));
        } else {
            fail("unknown line type \"" + type + "\"");
        }
    }
    // A file with no content lines is an empty transcript.
    if (!saw_header) return transcript;
    close_open_turn();
    return transcript;
}

Transcript load_transcript(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::not_found, "transcript not found: " + path.string());
    return parse_transcript(in, path.string());
}

} // namespace strata
