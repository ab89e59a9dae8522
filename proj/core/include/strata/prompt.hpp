#pragma once

#include "strata/types.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace strata {

// Text template with {{placeholder}} sections. Every section placeholder must
// appear exactly once, in the canonical order, so rendered prompts always
// present tiers in the same sequence.
class PromptTemplate {
public:
    static const std::vector<std::string>& section_names();

    static const PromptTemplate& builtin();
    static PromptTemplate parse(std::string_view source);
    static PromptTemplate load(const std::filesystem::path& path);

    std::string render(const std::map<std::string, std::string>& sections) const;

    int version() const noexcept { return version_; }

private:
    struct Piece {
        bool placeholder = false;
        std::string text;
    };

    int version_ = 0;
    std::vector<Piece> pieces_;
};

extern const char* const kBuiltinPromptTemplate;

// Deterministic prompt from a bundle and the query: same input, same bytes.
std::string assemble_prompt(const RetrievalBundle& bundle, std::string_view query,
                            const PromptTemplate& tmpl = PromptTemplate::builtin());

} // namespace strata
