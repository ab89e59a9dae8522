#include "strata/prompt.hpp"

#include "strata/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace strata {

const char* const kBuiltinPromptTemplate =
    "#!strata-template v1\n"
    "=== AGENT PROFILE ===\n"
    "{{agent_profile}}\n"
    "=== AGENT TRAITS ===\n"
    "{{agent_traits}}\n"
    "=== USER PROFILE ===\n"
    "{{user_profile}}\n"
    "=== USER TRAITS ===\n"
    "{{user_traits}}\n"
    "=== USER KNOWLEDGE ===\n"
    "{{user_kb}}\n"
    "=== RELATED PAST DIALOGUE ===\n"
    "{{mtm_pages}}\n"
    "=== RECENT DIALOGUE ===\n"
    "{{stm_pages}}\n"
    "=== QUERY ===\n"
    "{{query}}\n";

namespace {

constexpr std::string_view kHeaderPrefix = "#!strata-template v";

std::string format_confidence(double confidence) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", confidence);
    return buf;
}

std::string render_profile(const ProfileMap& profile) {
    std::string out;
    for (const auto& [key, value] : profile) {
        if (!out.empty()) out.push_back('\n');
        out += key + ": " + value;
    }
    return out;
}

std::string render_traits(const TraitMap& traits) {
    std::string out;
    for (const auto& [dimension, trait] : traits) {
        if (!out.empty()) out.push_back('\n');
        out += dimension + ": " + trait.value + " (confidence " + format_confidence(trait.confidence) + ")";
    }
    return out;
}

std::string render_facts(const std::vector<ScoredFact>& facts) {
    std::string out;
    for (const auto& hit : facts) {
        if (!out.empty()) out.push_back('\n');
        out += "- " + hit.fact.text;
    }
    return out;
}

std::string render_page(const DialoguePage& page) {
    const std::string stamp = "[t=" + std::to_string(page.timestamp) + "] ";
    return stamp + "User: " + page.query + "\n" + stamp + "Assistant: " + page.response;
}

} // namespace

const std::vector<std::string>& PromptTemplate::section_names() {
    static const std::vector<std::string> names = {
        "agent_profile", "agent_traits", "user_profile", "user_traits",
        "user_kb", "mtm_pages", "stm_pages", "query"};
    return names;
}

PromptTemplate PromptTemplate::parse(std::string_view source) {
    PromptTemplate tmpl;
    if (source.starts_with(kHeaderPrefix)) {
        const auto eol = source.find('\n');
        const std::string digits(source.substr(kHeaderPrefix.size(), eol - kHeaderPrefix.size()));
        try {
            tmpl.version_ = std::stoi(digits);
        } catch (const std::exception&) {
            throw Error(ErrorCode::parse, "prompt template: bad version header");
        }
        source = eol == std::string_view::npos ? std::string_view{} : source.substr(eol + 1);
    }

    std::size_t next_section = 0;
    const auto& names = section_names();
    while (!source.empty()) {
        const auto open = source.find("{{");
        if (open == std::string_view::npos) {
            tmpl.pieces_.push_back({false, std::string(source)});
            break;
        }
        if (open > 0) tmpl.pieces_.push_back({false, std::string(source.substr(0, open))});
        const auto close = source.find("}}", open);
        if (close == std::string_view::npos) throw Error(ErrorCode::parse, "prompt template: unterminated {{");
        std::string name(source.substr(open + 2, close - open - 2));
        if (next_section >= names.size() || name != names[next_section]) {
            throw Error(ErrorCode::parse, "prompt template: unexpected placeholder {{" + name + "}}; expected {{" +
                                              (next_section < names.size() ? names[next_section] : "<none>") + "}}");
        }
        ++next_section;
        tmpl.pieces_.push_back({true, std::move(name)});
        source = source.substr(close + 2);
    }
    if (next_section != names.size()) {
        throw Error(ErrorCode::parse, "prompt template: missing placeholder {{" + names[next_section] + "}}");
    }
    return tmpl;
}

const PromptTemplate& PromptTemplate::builtin() {
    static const PromptTemplate tmpl = parse(kBuiltinPromptTemplate);
    return tmpl;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::not_found, "prompt template not found: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& sections) const {
    std::string out;
    for (const auto& piece : pieces_) {
        if (!piece.placeholder) {
            out += piece.text;
            continue;
        }
        auto it = sections.find(piece.text);
        if (it != sections.end()) out += it->second;
    }
    return out;
}

std::string assemble_prompt(const RetrievalBundle& bundle, std::string_view query, const PromptTemplate& tmpl) {
    std::map<std::string, std::string> sections;
    sections["agent_profile"] = render_profile(bundle.agent_profile);
    sections["agent_traits"] = render_facts(bundle.agent_trait_hits);
    sections["user_profile"] = render_profile(bundle.user_profile);
    sections["user_traits"] = render_traits(bundle.user_traits);
    sections["user_kb"] = render_facts(bundle.user_kb_hits);

    std::string mtm;
    for (const auto& hit : bundle.mtm_pages) {
        if (!mtm.empty()) mtm.push_back('\n');
        mtm += render_page(hit.page);
    }
    sections["mtm_pages"] = std::move(mtm);

    std::string stm;
    for (const auto& page : bundle.stm_pages) {
        if (!stm.empty()) stm.push_back('\n');
        stm += render_page(page);
    }
    sections["stm_pages"] = std::move(stm);
    sections["query"] = std::string(query);
    return tmpl.render(sections);
}

} // namespace strata
