// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commontom/answers.hpp"
#include "commontom/cogstate.hpp"
#include "commontom/eval.hpp"
#include "commontom/modelclient.hpp"
#include "commontom/querygen.hpp"
#include "oracle/transcription.hpp"
#include "support/mock_server.hpp"
#include "support/test_support.hpp"

using namespace ctom;
using namespace std::chrono_literals;

namespace {

struct Check {
    bool ok = true;
    std::string why;
    void require(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            why = msg;
        }
    }
};

std::string s(auto v) { return std::string(to_string(v)); }

Check extract_golden() {
    Check c;
    auto corpus = load_corpus(testsupport::fixture("smoking_extract.jsonl"));
    const auto& e = corpus.at(0).events.at(0);
    std::vector<Speaker> a{Speaker::A}, ba{Speaker::B, Speaker::A};
    auto ask = [&](TurnIndex t, const std::vector<Speaker>& chain) {
        return resolve(Certainty::CertainlyNot, chain, *e.state_at(t));
    };
    for (TurnIndex t : {114, 115, 116})
        c.require(!ask(t, a) && !ask(t, ba), "expected (No, No) at " + std::to_string(t));
    for (TurnIndex t : {117, 118, 119})
        c.require(ask(t, a) && ask(t, ba), "expected (Yes, Yes) at " + std::to_string(t));
    auto points = detect_points(e);
    c.require(points.size() == 2 && points[0].turn == 114 && points[1].turn == 117,
              "points of interest should be 114 and 117");
    return c;
}

Check resolver_oracle() {
    Check c;
    auto start = std::chrono::steady_clock::now();
    int tuples = 0, mismatches = 0;
    for (auto q : kAllCertainties)
        for (auto ba : kAllBeliefs)
            for (auto bb : kAllBeliefs)
                for (auto ca : kAllCGLabels)
                    for (auto cb : kAllCGLabels) {
                        ++tuples;
                        AnnotationState st{ba, bb, ca, cb};
                        auto qs = s(as_belief(q));
                        for (auto x : {Speaker::A, Speaker::B}) {
                            auto y = other(x);
                            mismatches += resolve_first(q, x, st) !=
                                          oracle::resolve_1st_order_yn_answer(qs, s(st.bel(x)));
                            mismatches += resolve_second(q, x, y, st) !=
                                          oracle::resolve_2nd_order_yn_answer(
                                              qs, s(st.bel(x)), s(st.bel(y)), s(st.cg(x)), s(st.cg(y)));
                            mismatches += resolve_third(q, x, y, st) !=
                                          oracle::resolve_3rd_order_yn_answer(
                                              qs, s(st.bel(x)), s(st.bel(y)), s(st.cg(x)), s(st.cg(y)));
                        }
                    }
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    c.require(tuples == 768, "expected 768 tuples");
    c.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    c.require(ms < 1000, "took " + std::to_string(ms) + " ms");
    return c;
}

Check cg_oracle() {
    Check c;
    for (auto a : kAllBeliefs)
        for (auto b : kAllBeliefs) {
            auto got = infer_cg(a, b);
            auto want = oracle::cg_from_beliefs(s(a), s(b));
            std::string have = got.ja_in_underdetermined ? "JA|IN"
                               : got.cg                  ? s(*got.cg)
                               : got.rule == 5           ? "NULL"
                                                         : "";
            c.require(have == want && got.rule == oracle::cg_rule_from_beliefs(s(a), s(b)),
                      s(a) + "/" + s(b) + " gave " + have + ", want " + want);
        }
    c.require(infer_cg(BeliefLabel::CertainlyNot, BeliefLabel::NoBelief).cg == CGLabel::Rejected,
              "(CT-, NB) should be RT");
    auto psps = infer_cg(BeliefLabel::Possibly, BeliefLabel::Possibly);
    c.require(!psps.cg && !psps.diagnostic.empty(), "(PS, PS) should be none with a diagnostic");
    return c;
}

Check query_count_law() {
    Check c;
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200 && c.ok; ++i) {
        std::vector<Dialog> corpus{testsupport::random_dialog(rng, "r" + std::to_string(i), 1)};
        auto points = detect_points(corpus[0].events[0]);
        auto qs = build_benchmark(corpus, 1.0, static_cast<std::uint64_t>(i)).queries;
        c.require(qs.size() == 18 * points.size(), "event " + std::to_string(i) + ": wrong count");
        std::map<TurnIndex, std::array<int, 4>> per;
        for (const auto& q : qs) {
            per[q.anchor_turn][q.order()]++;
            for (std::size_t k = 1; k < q.chain.size(); ++k)
                c.require(q.chain[k] != q.chain[k - 1], "self-belief chain in " + q.query_id);
        }
        for (const auto& [t, n] : per)
            c.require(n[1] == 6 && n[2] == 6 && n[3] == 6, "not 6 per order at " + std::to_string(t));
    }
    return c;
}

Check random_baseline_closed_form() {
    Check c;
    std::vector<Query> qs;
    for (std::size_t i = 0; i < 965 + 1139; ++i) {
        Query q;
        q.query_id = "q" + std::to_string(i);
        q.dialog_id = "d";
        q.event_id = "e";
        q.chain = {Speaker::A};
        q.gold = i < 965;
        qs.push_back(q);
    }
    const double total = 2371 + 2899;
    auto r = random_baseline(qs, 2371 / total, 2899 / total, 2024, 10000);
    c.require(std::abs(r.expected - 0.504) <= 0.002, "expected " + std::to_string(r.expected));
    double sigma = std::sqrt(r.expected * (1 - r.expected) / qs.size()) / std::sqrt(10000.0);
    c.require(std::abs(r.mc_mean - r.expected) <= 3 * sigma,
              "Monte-Carlo mean " + std::to_string(r.mc_mean) + " outside 3 sigma");
    return c;
}

Check determinism() {
    Check c;
    auto corpus = load_corpus(testsupport::fixture("synthetic.jsonl"));
    auto a = serialize_benchmark(build_benchmark(corpus, 0.5, 77).queries);
    auto b = serialize_benchmark(build_benchmark(corpus, 0.5, 77).queries);
    c.require(a == b, "benchmark bytes differ between runs");

    AnnotationState maj{BeliefLabel::CertainlyTrue, BeliefLabel::CertainlyTrue, CGLabel::JustAdded,
                        CGLabel::JustAdded};
    std::vector<EventTimeline> events;
    events.reserve(1000);
    std::vector<AnchoredPoint> pts;
    for (int i = 0; i < 1000; ++i) {
        events.push_back({"e" + std::to_string(i), "p", {{0, maj, true}}});
        pts.push_back({"d" + std::to_string(i % 37), &events.back(),
                       {events.back().event_id, 0, PointKind::Introduction, maj}});
    }
    auto n1 = sample_majority(pts, 0.1, 20240611).size();
    auto n2 = sample_majority(pts, 0.1, 20240611).size();
    c.require(n1 >= 70 && n1 <= 130, "retained " + std::to_string(n1));
    c.require(n1 == n2, "retained count differs between runs");
    return c;
}

Check metrics_properties() {
    Check c;
    auto corpus = load_corpus(testsupport::fixture("synthetic.jsonl"));
    auto qs = build_benchmark(corpus, 1.0, 1).queries;
    std::mt19937_64 rng(8);
    std::bernoulli_distribution coin(0.15);
    for (int i = 0; i < 100; ++i) {
        std::vector<Prediction> preds;
        for (const auto& q : qs) preds.push_back({q.query_id, coin(rng) ? !*q.gold : *q.gold, {}});
        auto m = score(qs, preds);
        for (int k = 0; k < 3; ++k)
            c.require(*m.consistency <= *m.per_order_accuracy[k] + 1e-12,
                      "consistency above order " + std::to_string(k + 1) + " accuracy");
    }
    std::vector<double> x{0.2, 0.9, 0.4, 0.0, 1.0}, inv, flat(5, 0.5);
    for (double v : x) inv.push_back(1 - v);
    c.require(std::abs(*pearson(x, x) - 1) < 1e-12, "pearson(x,x) != 1");
    c.require(std::abs(*pearson(x, inv) + 1) < 1e-12, "pearson(x,1-x) != -1");
    c.require(!pearson(x, flat), "constant input should be undefined");

    std::vector<Prediction> echo;
    for (const auto& q : qs) echo.push_back({q.query_id, q.gold, {}});
    auto m = score(qs, echo);
    bool perfect = m.total_accuracy == 1.0 && m.consistency == 1.0;
    for (auto& a : m.per_order_accuracy) perfect = perfect && a == 1.0;
    c.require(perfect, "gold echo is not 1.0 everywhere");
    return c;
}

Check model_client() {
    Check c;
    auto corpus = load_corpus(testsupport::fixture("synthetic.jsonl"));
    auto all = build_benchmark(corpus, 1.0, 1).queries;
    std::vector<Query> qs(all.begin(), all.begin() + 100);

    EndpointConfig ep;
    ep.model = "mock";
    ep.max_concurrency = 4;
    ep.backoff = {1ms, 1ms};
    ep.timeout = 5000ms;

    {
        testsupport::MockChatServer server(
            [](const std::string& p, std::size_t) { return testsupport::MockReply{200, p.size() % 2 ? "Yes." : "No"}; },
            5ms);
        ep.base_url = server.base_url();
        auto start = std::chrono::steady_clock::now();
        auto r = run_benchmark(qs, corpus, PromptSpec{}, ep);
        auto took = std::chrono::steady_clock::now() - start;
        c.require(!r.aborted && r.completed().size() == 100, "mock run incomplete");
        c.require(took < 10s, "100 queries took too long");
        c.require(server.max_in_flight() <= 4,
                  "saw " + std::to_string(server.max_in_flight()) + " requests in flight");
    }
    {
        testsupport::MockChatServer server([](const std::string&, std::size_t call) {
            return call < 2 ? testsupport::MockReply{429, ""} : testsupport::MockReply{200, "No"};
        });
        ep.base_url = server.base_url();
        ep.max_attempts = 3;
        std::vector<Query> few(qs.begin(), qs.begin() + 5);
        auto r = run_benchmark(few, corpus, PromptSpec{}, ep);
        for (std::size_t i = 0; i < few.size(); ++i)
            c.require(r.log[i] && r.log[i]->attempts == 3 && r.predictions[i]->answer == false,
                      "retry schedule not honored for " + few[i].query_id);
        std::ostringstream log;
        write_run_log(log, r, ep);
        c.require(log.str().find("\"attempts\":3") != std::string::npos, "attempts missing from log");
    }
    c.require(parse_answer("Yes.") == true, "\"Yes.\" should be yes");
    c.require(parse_answer("no, because A never said so") == false, "\"no, because\" should be no");
    c.require(!parse_answer("I cannot determine that."), "hedge should be unparseable");
    return c;
}

}  // namespace

int main() {
    struct Item {
        const char* name;
        std::function<Check()> run;
    };
    std::vector<Item> items{
        {"1 smoking extract golden answers", extract_golden},
        {"2 resolver oracle equivalence (768 tuples)", resolver_oracle},
        {"3 common-ground oracle equivalence (16 pairs)", cg_oracle},
        {"4 query-count law (200 random events)", query_count_law},
        {"5 random baseline closed form", random_baseline_closed_form},
        {"6 end-to-end determinism and sampling rate", determinism},
        {"7 metrics properties", metrics_properties},
        {"8 model client against mock server", model_client},
    };
    int failures = 0;
    for (const auto& item : items) {
        Check c;
        try {
            c = item.run();
        } catch (const std::exception& e) {
            c.ok = false;
            c.why = std::string("exception: ") + e.what();
        }
        std::printf("%s  %s%s%s\n", c.ok ? "PASS" : "FAIL", item.name, c.ok ? "" : "  -- ",
                    c.why.c_str());
        failures += !c.ok;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(items.size()) - failures, items.size());
    return failures;
}
