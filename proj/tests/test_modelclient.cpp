#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <sstream>

#include "commontom/error.hpp"
#include "commontom/modelclient.hpp"
#include "commontom/querygen.hpp"
#include "support/mock_server.hpp"
#include "support/test_support.hpp"

using namespace ctom;
using namespace std::chrono_literals;
using testsupport::MockChatServer;
using testsupport::MockReply;

namespace {

struct Bench {
    std::vector<Dialog> corpus = load_corpus(testsupport::fixture("synthetic.jsonl"));
    std::vector<Query> queries = build_benchmark(corpus, 1.0, 1).queries;

    std::vector<Query> first(std::size_t n) const {
        return {queries.begin(), queries.begin() + static_cast<std::ptrdiff_t>(n)};
    }
};

EndpointConfig fast(const std::string& url) {
    EndpointConfig ep;
    ep.base_url = url;
    ep.model = "mock-model";
    ep.backoff = {1ms, 2ms};
    ep.timeout = 5000ms;
    return ep;
}

}  // namespace

TEST(BuildPrompt, ContextWindowAndMarker) {
    auto corpus = load_corpus(testsupport::fixture("smoking_extract.jsonl"));
    auto qs = build_benchmark(corpus, 1.0, 1).queries;
    auto q = *std::find_if(qs.begin(), qs.end(), [](const Query& x) { return x.anchor_turn == 117; });
    PromptSpec spec;
    spec.context_before = 3;
    spec.context_after = 2;
    auto p = build_prompt(q, corpus[0], spec);

    EXPECT_EQ(p.rfind(std::string(kZeroShotInstruction) + "\n\nConversation:\n", 0), 0u);
    for (int t = 114; t <= 119; ++t)
        EXPECT_NE(p.find("\n" + std::to_string(t) + " | "), std::string::npos) << t;
    EXPECT_NE(p.find(std::string(kAnchorMarker) + "\n"), std::string::npos);
    auto marked = p.find(kAnchorMarker);
    auto line_start = p.rfind('\n', marked) + 1;
    EXPECT_EQ(p.substr(line_start, 6), "117 | ");
    EXPECT_EQ(p.find(kAnchorMarker, marked + 1), std::string::npos);
    EXPECT_TRUE(p.ends_with("\nQuestion:\n" + q.text));

    spec.chain_of_thought = true;
    EXPECT_THROW(build_prompt(q, corpus[0], spec), Error);
}

TEST(ParseAnswer, Contract) {
    EXPECT_EQ(parse_answer("Yes."), true);
    EXPECT_EQ(parse_answer("no, because A never said so"), false);
    EXPECT_EQ(parse_answer("I cannot determine that."), std::nullopt);
    EXPECT_EQ(parse_answer("  YES"), true);
    EXPECT_EQ(parse_answer("The answer is no"), false);
    EXPECT_EQ(parse_answer("yes or no?"), true);
    EXPECT_EQ(parse_answer("maybe yes, maybe no"), std::nullopt);
    EXPECT_EQ(parse_answer("nobody knows"), std::nullopt);
    EXPECT_EQ(parse_answer(""), std::nullopt);
}

TEST(RunBenchmark, AllYes) {
    Bench b;
    MockChatServer server([](const std::string&, std::size_t) { return MockReply{200, "Yes."}; });
    auto qs = b.first(20);
    auto r = run_benchmark(qs, b.corpus, PromptSpec{}, fast(server.base_url()));
    EXPECT_FALSE(r.aborted);
    auto preds = r.completed();
    ASSERT_EQ(preds.size(), 20u);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        EXPECT_EQ(preds[i].query_id, qs[i].query_id);
        EXPECT_EQ(preds[i].answer, true);
        EXPECT_EQ(r.log[i]->attempts, 1u);
    }
    auto body = nlohmann::json::parse(server.last_body());
    EXPECT_EQ(body["model"], "mock-model");
    EXPECT_EQ(body["temperature"], 1.0);
    EXPECT_EQ(body["messages"][0]["role"], "user");
}

TEST(RunBenchmark, RetriesThrottling) {
    Bench b;
    MockChatServer server([](const std::string&, std::size_t call) {
        return call < 2 ? MockReply{429, ""} : MockReply{200, "No"};
    });
    auto qs = b.first(3);
    auto r = run_benchmark(qs, b.corpus, PromptSpec{}, fast(server.base_url()));
    ASSERT_EQ(r.completed().size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(r.predictions[i]->answer, false);
        EXPECT_EQ(r.log[i]->attempts, 3u);
        EXPECT_EQ(r.log[i]->http_status, 200);
    }
    EXPECT_EQ(server.requests(), 9u);
}

TEST(RunBenchmark, ExhaustedRetriesAreUnparseable) {
    Bench b;
    MockChatServer server([](const std::string&, std::size_t) { return MockReply{503, ""}; });
    auto ep = fast(server.base_url());
    ep.max_attempts = 2;
    auto r = run_benchmark(b.first(2), b.corpus, PromptSpec{}, ep);
    EXPECT_FALSE(r.aborted);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_FALSE(r.predictions[i]->answer);
        EXPECT_EQ(r.log[i]->attempts, 2u);
        EXPECT_EQ(r.log[i]->http_status, 503);
    }
}

TEST(RunBenchmark, ClientErrorsAreNotRetried) {
    Bench b;
    MockChatServer server([](const std::string&, std::size_t) { return MockReply{400, ""}; });
    auto r = run_benchmark(b.first(1), b.corpus, PromptSpec{}, fast(server.base_url()));
    EXPECT_EQ(r.log[0]->attempts, 1u);
    EXPECT_FALSE(r.predictions[0]->answer);
}

TEST(RunBenchmark, GarbageIsUnparseable) {
    Bench b;
    MockChatServer server([](const std::string&, std::size_t call) {
        return call == 0 ? MockReply{200, "", "<html>not json</html>"}
                         : MockReply{200, "I would rather not say."};
    });
    auto qs = b.first(1);
    auto r1 = run_benchmark(qs, b.corpus, PromptSpec{}, fast(server.base_url()));
    EXPECT_FALSE(r1.predictions[0]->answer);
    auto r2 = run_benchmark(qs, b.corpus, PromptSpec{}, fast(server.base_url()));
    EXPECT_FALSE(r2.predictions[0]->answer);
    EXPECT_EQ(r2.predictions[0]->raw, "I would rather not say.");
}

TEST(RunBenchmark, ConcurrencyBound) {
    Bench b;
    MockChatServer server([](const std::string&, std::size_t) { return MockReply{200, "yes"}; }, 20ms);
    auto ep = fast(server.base_url());
    ep.max_concurrency = 3;
    auto r = run_benchmark(b.first(30), b.corpus, PromptSpec{}, ep);
    EXPECT_EQ(r.completed().size(), 30u);
    EXPECT_LE(server.max_in_flight(), 3);
    EXPECT_GE(server.max_in_flight(), 2);
}

TEST(RunBenchmark, UnreachableAborts) {
    Bench b;
    std::string url;
    {
        MockChatServer gone([](const std::string&, std::size_t) { return MockReply{}; });
        url = gone.base_url();
    }
    auto ep = fast(url);
    ep.max_concurrency = 1;
    ep.timeout = 500ms;
    auto r = run_benchmark(b.first(5), b.corpus, PromptSpec{}, ep);
    EXPECT_TRUE(r.aborted);
    EXPECT_FALSE(r.abort_reason.empty());
    EXPECT_LT(r.completed().size(), 5u);
}

TEST(RunBenchmark, AuthHeaderAndRedaction) {
    Bench b;
    MockChatServer server([](const std::string&, std::size_t) { return MockReply{200, "yes"}; });
    auto ep = fast(server.base_url());
    ep.auth_env = "COMMONTOM_TEST_UNSET_TOKEN";
    ::unsetenv(ep.auth_env.c_str());
    EXPECT_THROW(run_benchmark(b.first(1), b.corpus, PromptSpec{}, ep), Error);

    ep.auth_env = "COMMONTOM_TEST_TOKEN";
    ::setenv(ep.auth_env.c_str(), "sekrit-123", 1);
    auto r = run_benchmark(b.first(1), b.corpus, PromptSpec{}, ep);
    EXPECT_EQ(server.last_authorization(), "Bearer sekrit-123");
    std::ostringstream log;
    write_run_log(log, r, ep);
    EXPECT_EQ(log.str().find("sekrit-123"), std::string::npos);
    EXPECT_NE(log.str().find("\"attempts\":1"), std::string::npos);
}

TEST(RunBenchmark, HundredQueriesUnderTenSeconds) {
    Bench b;
    MockChatServer server([](const std::string& prompt, std::size_t) {
        return MockReply{200, prompt.size() % 2 ? "Yes" : "No"};
    }, 5ms);
    auto start = std::chrono::steady_clock::now();
    auto r = run_benchmark(b.first(100), b.corpus, PromptSpec{}, fast(server.base_url()));
    EXPECT_LT(std::chrono::steady_clock::now() - start, 10s);
    EXPECT_EQ(r.completed().size(), 100u);
    EXPECT_FALSE(r.aborted);
}
