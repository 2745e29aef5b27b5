#include <gtest/gtest.h>

#include <random>

#include "commontom/cogstate.hpp"
#include "commontom/error.hpp"
#include "oracle/transcription.hpp"
#include "support/test_support.hpp"

using namespace ctom;
using B = BeliefLabel;

TEST(InferCG, Examples) {
    auto r = infer_cg(B::CertainlyTrue, B::CertainlyTrue);
    EXPECT_TRUE(r.ja_in_underdetermined);
    EXPECT_EQ(r.rule, 2);

    r = infer_cg(B::CertainlyNot, B::NoBelief);
    EXPECT_EQ(r.cg, CGLabel::Rejected);
    EXPECT_EQ(r.rule, 1);

    r = infer_cg(B::Possibly, B::Possibly);
    EXPECT_FALSE(r.cg);
    EXPECT_EQ(r.rule, 0);
    EXPECT_FALSE(r.diagnostic.empty());

    r = infer_cg(B::NoBelief, B::Possibly);
    EXPECT_FALSE(r.cg);
    EXPECT_EQ(r.rule, 5);
    EXPECT_TRUE(r.diagnostic.empty());
}

TEST(InferCG, AgreesWithOrderedRulesOnAllPairs) {
    int mismatches = 0;
    for (auto a : kAllBeliefs) {
        for (auto b : kAllBeliefs) {
            auto want = oracle::cg_from_beliefs(std::string(to_string(a)), std::string(to_string(b)));
            auto got = infer_cg(a, b);
            std::string have;
            if (got.ja_in_underdetermined)
                have = "JA|IN";
            else if (got.cg)
                have = std::string(to_string(*got.cg));
            else
                have = got.rule == 5 ? "NULL" : "";
            if (have != want ||
                got.rule != oracle::cg_rule_from_beliefs(std::string(to_string(a)),
                                                         std::string(to_string(b)))) {
                ++mismatches;
                ADD_FAILURE() << to_string(a) << "/" << to_string(b) << ": " << have << " vs " << want;
            }
        }
    }
    EXPECT_EQ(mismatches, 0);
}

TEST(InferCG, RejectionTakesPrecedenceOverNoBelief) {
    EXPECT_EQ(infer_cg(B::CertainlyNot, B::NoBelief).cg, CGLabel::Rejected);
    EXPECT_EQ(infer_cg(B::NoBelief, B::CertainlyNot).cg, CGLabel::Rejected);
}

TEST(ResolveJaIn, FirstPositiveRowIsJustAdded) {
    EventTimeline e{"e", "p",
                    {{1, {B::NoBelief, B::NoBelief, CGLabel::NotAnnotated, CGLabel::NotAnnotated}, true},
                     {3, {B::CertainlyTrue, B::CertainlyTrue, CGLabel::JustAdded, CGLabel::JustAdded}, true},
                     {5, {B::CertainlyTrue, B::Possibly, CGLabel::In, CGLabel::In}, true}}};
    auto inf = infer_cg(B::CertainlyTrue, B::CertainlyTrue);
    EXPECT_EQ(resolve_ja_in(inf, e, 3), CGLabel::JustAdded);
    EXPECT_EQ(resolve_ja_in(inf, e, 4), CGLabel::In);
    EXPECT_EQ(resolve_ja_in(inf, e, 5), CGLabel::In);
    EXPECT_THROW(resolve_ja_in(inf, e, 1), Error);
    EXPECT_THROW(resolve_ja_in(inf, e, 0), Error);
    EXPECT_THROW(resolve_ja_in(infer_cg(B::CertainlyNot, B::NoBelief), e, 3), Error);

    auto rows = infer_timeline(e);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].cg, CGLabel::NotAnnotated);
    EXPECT_EQ(rows[1].cg, CGLabel::JustAdded);
    EXPECT_EQ(rows[2].cg, CGLabel::In);
}

TEST(InferCorpus, SmokingExtract) {
    auto corpus = load_corpus(testsupport::fixture("smoking_extract.jsonl"));
    auto r = infer_corpus(corpus);
    EXPECT_EQ(r.rows, 6u);
    EXPECT_EQ(r.rows_with_gold, 6u);
    // A has no belief and B rejects: the rules say RT where the annotators wrote NA.
    EXPECT_EQ(r.agreeing, 3u);
    ASSERT_EQ(r.divergences.size(), 3u);
    for (const auto& d : r.divergences) {
        EXPECT_LE(d.turn, 116);
        EXPECT_EQ(d.inferred, CGLabel::Rejected);
        EXPECT_EQ(d.gold.cg_a, CGLabel::NotAnnotated);
        EXPECT_EQ(d.rule, 1);
    }
    for (const auto& row : r.corpus[0].events[0].rows) EXPECT_EQ(row.state.cg_a, CGLabel::Rejected);
}

TEST(DetectPoints, SmokingExtract) {
    auto corpus = load_corpus(testsupport::fixture("smoking_extract.jsonl"));
    auto points = detect_points(corpus[0].events[0]);
    ASSERT_EQ(points.size(), 2u);
    EXPECT_EQ(points[0].turn, 114);
    EXPECT_EQ(points[0].kind, PointKind::Introduction);
    EXPECT_EQ(points[0].state, (AnnotationState{B::NoBelief, B::CertainlyNot, CGLabel::NotAnnotated,
                                                CGLabel::NotAnnotated}));
    EXPECT_EQ(points[1].turn, 117);
    EXPECT_EQ(points[1].kind, PointKind::Change);
    EXPECT_EQ(points[1].state, (AnnotationState{B::CertainlyNot, B::CertainlyNot, CGLabel::Rejected,
                                                CGLabel::Rejected}));
}

TEST(Properties, CogstateLaws) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        auto a = testsupport::random_belief(rng), b = testsupport::random_belief(rng);
        auto r = infer_cg(a, b);
        // CT- anywhere forces rejection
        if (a == B::CertainlyNot || b == B::CertainlyNot) {
            EXPECT_EQ(r.cg, CGLabel::Rejected);
        }
        // rules 2-4 never fire with NB
        if (r.ja_in_underdetermined) {
            EXPECT_TRUE(a != B::NoBelief && b != B::NoBelief);
        }
        EXPECT_EQ(infer_cg(a, b), r);
    }
    for (int i = 0; i < 300; ++i) {
        std::vector<Turn> turns;
        for (TurnIndex t = 0; t < 10; ++t) turns.push_back({t, Speaker::A, "x"});
        auto e = testsupport::random_event(rng, "e", turns);
        auto points = detect_points(e);
        ASSERT_FALSE(points.empty());
        EXPECT_EQ(points[0].kind, PointKind::Introduction);
        EXPECT_EQ(points[0].turn, e.rows[0].turn);
        for (std::size_t k = 1; k < points.size(); ++k) {
            EXPECT_EQ(points[k].kind, PointKind::Change);
            EXPECT_LT(points[k - 1].turn, points[k].turn);
            EXPECT_NE(points[k - 1].state, points[k].state);
        }
        std::size_t changes = 0;
        for (std::size_t k = 1; k < e.rows.size(); ++k) changes += e.rows[k].state != e.rows[k - 1].state;
        EXPECT_EQ(points.size(), changes + 1);
    }
}
