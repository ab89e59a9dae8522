#include "strata/error.hpp"
#include "strata/prompt.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace strata;

namespace {

std::vector<std::size_t> header_positions(const std::string& prompt) {
    std::vector<std::size_t> out;
    for (const char* h : {"=== AGENT PROFILE ===", "=== AGENT TRAITS ===", "=== USER PROFILE ===",
                          "=== USER TRAITS ===", "=== USER KNOWLEDGE ===", "=== RELATED PAST DIALOGUE ===",
                          "=== RECENT DIALOGUE ===", "=== QUERY ==="}) {
        out.push_back(prompt.find(h));
    }
    return out;
}

} // namespace

TEST(Prompt, EmptyBundleHasOnlyHeadersAndQuery) {
    const std::string prompt = assemble_prompt(RetrievalBundle{}, "where is my dog?");
    EXPECT_EQ(prompt,
              "=== AGENT PROFILE ===\n\n=== AGENT TRAITS ===\n\n=== USER PROFILE ===\n\n=== USER TRAITS ===\n\n"
              "=== USER KNOWLEDGE ===\n\n=== RELATED PAST DIALOGUE ===\n\n=== RECENT DIALOGUE ===\n\n"
              "=== QUERY ===\nwhere is my dog?\n");
}

TEST(Prompt, DeterministicAndOrdered) {
    IdSequence ids;
    RetrievalBundle b;
    for (int i = 0; i < 5; ++i) b.stm_pages.push_back(new_page(ids, "q" + std::to_string(i), "r", i));
    b.mtm_pages.push_back({new_page(ids, "old question", "old answer", 0), SegmentId{1}, 0.7});
    b.user_kb_hits.push_back({FactEntry{"user said: I like tea", {}, {}, 0}, 0.3});
    b.user_traits["openness"] = {"high", 0.9, 3};
    b.user_profile["name"] = "Maya";
    const std::string a = assemble_prompt(b, "hello");
    EXPECT_EQ(a, assemble_prompt(b, "hello"));
    const auto pos = header_positions(a);
    for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
        ASSERT_NE(pos[i], std::string::npos);
        EXPECT_LT(pos[i], pos[i + 1]);
    }
    EXPECT_NE(a.find("openness: high (confidence 0.90)"), std::string::npos);
    EXPECT_NE(a.find("- user said: I like tea"), std::string::npos);
    EXPECT_NE(a.find("[t=0] User: old question\n[t=0] Assistant: old answer"), std::string::npos);
    EXPECT_NE(a.find("name: Maya"), std::string::npos);

    // Order of sections does not depend on section sizes.
    RetrievalBundle big = b;
    for (int i = 0; i < 50; ++i) big.user_kb_hits.push_back({FactEntry{"f", {}, {}, 0}, 0.0});
    EXPECT_EQ(header_positions(assemble_prompt(big, "hello")).size(), pos.size());
    const auto big_pos = header_positions(assemble_prompt(big, "hello"));
    for (std::size_t i = 0; i + 1 < big_pos.size(); ++i) EXPECT_LT(big_pos[i], big_pos[i + 1]);
}

TEST(PromptTemplate, RejectsMissingOrReorderedPlaceholders) {
    EXPECT_THROW(PromptTemplate::parse("{{query}}"), Error);
    EXPECT_THROW(PromptTemplate::parse("{{agent_profile}}{{agent_traits"), Error);
    EXPECT_NO_THROW(PromptTemplate::parse(
        "{{agent_profile}}{{agent_traits}}{{user_profile}}{{user_traits}}{{user_kb}}{{mtm_pages}}{{stm_pages}}"
        "{{query}}"));
}

TEST(PromptTemplate, ShippedFileEqualsBuiltin) {
    const auto shipped = PromptTemplate::load(std::filesystem::path(STRATA_CONFIG_DIR) / "prompt_template.txt");
    IdSequence ids;
    RetrievalBundle b;
    b.stm_pages.push_back(new_page(ids, "q", "r", 1));
    EXPECT_EQ(shipped.render({}), PromptTemplate::builtin().render({}));
    EXPECT_EQ(assemble_prompt(b, "x", shipped), assemble_prompt(b, "x"));
}
