#include "strata/config.hpp"
#include "strata/error.hpp"
#include "strata/remote_provider.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <thread>

using namespace strata;
using nlohmann::json;

namespace {

// Minimal OpenAI-compatible endpoint. `reply` decides the content of each
// chat completion from the request; `fail_first` requests get `fail_status`.
class MockApi {
public:
    std::function<std::string(const json&)> reply = [](const json&) { return std::string("ok"); };
    std::atomic<int> fail_first{0};
    int fail_status = 500;
    std::atomic<int> chat_calls{0};
    std::atomic<int> embed_calls{0};
    json last_chat;
    std::string last_auth;

    MockApi() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            ++chat_calls;
            last_auth = req.get_header_value("Authorization");
            if (fail_first.fetch_sub(1) > 0) {
                res.status = fail_status;
                res.set_content(R"({"error":"nope"})", "application/json");
                return;
            }
            last_chat = json::parse(req.body);
            json out = {{"choices", {{{"message", {{"role", "assistant"}, {"content", reply(last_chat)}}}}}},
                        {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 3}}}};
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
            ++embed_calls;
            const json body = json::parse(req.body);
            const std::size_t dim = body.value("dimensions", 4);
            std::vector<double> v(dim, 0.0);
            v[0] = 1.0;
            json out = {{"data", {{{"embedding", v}, {"index", 0}}}}, {"usage", {{"prompt_tokens", 2}}}};
            res.set_content(out.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~MockApi() {
        server_.stop();
        thread_.join();
    }

    RemoteProviderConfig config(std::size_t dim = 4) const {
        RemoteProviderConfig c;
        c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1";
        c.api_key = "k-123";
        c.dimension = dim;
        c.timeout = std::chrono::milliseconds(2000);
        c.backoff = std::chrono::milliseconds(1);
        return c;
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

} // namespace

TEST(RemoteProvider, CompleteReturnsContentAndReportedTokens) {
    MockApi api;
    api.reply = [](const json& req) { return "echo:" + req["messages"].back()["content"].get<std::string>(); };
    RemoteProvider p(api.config());
    EXPECT_EQ(p.complete("hi"), "echo:hi");
    EXPECT_EQ(api.last_auth, "Bearer k-123");
    EXPECT_EQ(api.last_chat["model"], "gpt-4o-mini");
    const auto usage = p.log().usage();
    EXPECT_EQ(usage.input_tokens, 12u);
    EXPECT_EQ(usage.output_tokens, 3u);
}

TEST(RemoteProvider, EmbedRequestsConfiguredDimension) {
    MockApi api;
    RemoteProvider p(api.config(6));
    const Embedding e = p.embed("text");
    ASSERT_EQ(e.size(), 6u);
    EXPECT_EQ(e[0], 1.0);
    EXPECT_EQ(p.embed("   "), Embedding(6, 0.0));
    EXPECT_EQ(api.embed_calls.load(), 1);
}

TEST(RemoteProvider, KeywordsFromJsonOrCommaList) {
    MockApi api;
    api.reply = [](const json&) { return std::string("```json\n[\"Hiking\", \"trail\"]\n```"); };
    RemoteProvider p(api.config());
    EXPECT_EQ(p.extract_keywords("x"), (KeywordSet{"hiking", "trail"}));
    api.reply = [](const json&) { return std::string("coffee, espresso\nbeans"); };
    EXPECT_EQ(p.extract_keywords("x"), (KeywordSet{"coffee", "espresso", "beans"}));
}

TEST(RemoteProvider, ContinuityParsesYesNo) {
    MockApi api;
    RemoteProvider p(api.config());
    DialoguePage page;
    page.query = "q";
    api.reply = [](const json&) { return std::string("Yes."); };
    EXPECT_TRUE(p.judge_continuity(page, "meta"));
    api.reply = [](const json&) { return std::string("no"); };
    EXPECT_FALSE(p.judge_continuity(page, "meta"));
    api.reply = [](const json&) { return std::string("maybe"); };
    EXPECT_THROW(p.judge_continuity(page, "meta"), ProviderUnavailable);
}

TEST(RemoteProvider, PersonaRepliesFilteredBySchema) {
    MockApi api;
    api.reply = [](const json&) {
        return json{{"user_traits",
                     {{"openness", {{"value", "high"}, {"confidence", 0.7}}}, {"shoe_size", {{"value", "42"}}}}},
                    {"user_facts", {"likes tea"}},
                    {"agent_facts", {"recommended green tea"}}}
            .dump();
    };
    RemoteProvider p(api.config());
    Segment s;
    DialoguePage page;
    page.query = "I like tea";
    s.pages.push_back(page);
    const auto u = p.extract_persona_updates(s, default_trait_schema());
    ASSERT_EQ(u.user_traits.size(), 1u);
    EXPECT_EQ(u.user_traits.at("openness").value, "high");
    EXPECT_EQ(u.user_facts, std::vector<std::string>{"likes tea"});
    EXPECT_EQ(u.agent_facts, std::vector<std::string>{"recommended green tea"});
    const std::string system = api.last_chat["messages"][0]["content"];
    EXPECT_NE(system.find("openness"), std::string::npos);
}

TEST(RemoteProvider, MalformedPersonaJsonIsProviderFailure) {
    MockApi api;
    api.reply = [](const json&) { return std::string("I think the user likes tea"); };
    RemoteProvider p(api.config());
    Segment s;
    s.pages.push_back(DialoguePage{});
    s.pages[0].query = "q";
    EXPECT_THROW(p.extract_persona_updates(s, default_trait_schema()), ProviderUnavailable);
}

TEST(RemoteProvider, RetriesServerErrorsThenSucceeds) {
    MockApi api;
    api.fail_first = 2;
    RemoteProvider p(api.config());
    EXPECT_EQ(p.complete("x"), "ok");
    EXPECT_EQ(api.chat_calls.load(), 3);
}

TEST(RemoteProvider, GivesUpAfterRetries) {
    MockApi api;
    api.fail_first = 10;
    RemoteProvider p(api.config());
    EXPECT_THROW(p.complete("x"), ProviderUnavailable);
    EXPECT_EQ(api.chat_calls.load(), 3);
}

TEST(RemoteProvider, ClientErrorsAreNotRetried) {
    MockApi api;
    api.fail_first = 10;
    api.fail_status = 401;
    RemoteProvider p(api.config());
    EXPECT_THROW(p.complete("x"), ProviderUnavailable);
    EXPECT_EQ(api.chat_calls.load(), 1);
}

TEST(RemoteProvider, UnreachableHostIsProviderFailure) {
    RemoteProviderConfig c;
    c.base_url = "http://127.0.0.1:1/v1";
    c.dimension = 4;
    c.retries = 1;
    c.timeout = std::chrono::milliseconds(300);
    c.backoff = std::chrono::milliseconds(1);
    RemoteProvider p(c);
    EXPECT_THROW(p.complete("x"), ProviderUnavailable);
    EXPECT_EQ(p.log().usage().failed_calls, 1u);
}

TEST(RemoteProvider, ConfigFromEnvAndBadUrl) {
    const std::map<std::string, std::string> env{{"STRATA_PROVIDER_BASE_URL", "https://api.example.com/v1"},
                                                 {"STRATA_PROVIDER_MODEL", "m1"},
                                                 {"STRATA_PROVIDER_TIMEOUT_MS", "1500"}};
    const auto c = RemoteProviderConfig::from_env(
        [&](const std::string& k) -> std::optional<std::string> {
            auto it = env.find(k);
            return it == env.end() ? std::nullopt : std::optional<std::string>(it->second);
        },
        256);
    EXPECT_EQ(c.model, "m1");
    EXPECT_EQ(c.timeout.count(), 1500);
    EXPECT_EQ(c.dimension, 256u);
    RemoteProviderConfig bad;
    bad.base_url = "ftp://nope";
    EXPECT_THROW(RemoteProvider{bad}, ValidationError);
}
