#pragma once

// Common-ground inference from a pair of belief labels, and detection of the
// turns at which an event's annotation changes.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commontom/corpus.hpp"
#include "commontom/labels.hpp"

namespace ctom {

struct CGInference {
    // nullopt is the "no common ground" outcome. Serialized as NA.
    std::optional<CGLabel> cg;
    // True when the rules only establish "JA or IN"; cg then holds JA
    // until resolve_ja_in settles it.
    bool ja_in_underdetermined = false;
    // 1-5 for the rule that fired, 0 when none did.
    int rule = 0;
    std::string diagnostic;

    friend bool operator==(const CGInference&, const CGInference&) = default;
};

// Rules are tried in order and the first match wins:
//   1. either belief CT-        -> RT
//   2. CT+ / CT+                -> JA or IN
//   3. PS  / CT+                -> JA or IN
//   4. CT+ / PS                 -> JA or IN
//   5. either belief NB         -> none
// PS / PS matches nothing and yields none with a diagnostic.
CGInference infer_cg(BeliefLabel bel_a, BeliefLabel bel_b) noexcept;

// JA at the event's first row whose beliefs give an underdetermined positive
// inference, IN at every later turn. Throws InvalidArgument when `inference`
// is not underdetermined or the turn precedes that first positive row, and
// NotFound when the timeline does not cover `turn`.
CGLabel resolve_ja_in(const CGInference& inference, const EventTimeline& event,
                      TurnIndex turn);

// Per-row inferred CG, with JA/IN resolved and "none" written as NA.
struct InferredRow {
    TurnIndex turn = 0;
    CGInference inference;
    CGLabel cg = CGLabel::NotAnnotated;
};
std::vector<InferredRow> infer_timeline(const EventTimeline& event);

struct Divergence {
    std::string dialog_id;
    std::string event_id;
    TurnIndex turn = 0;
    AnnotationState gold;
    CGLabel inferred = CGLabel::NotAnnotated;
    int rule = 0;
    std::string diagnostic;
};

struct CorpusInference {
    // Input corpus with every row's CG replaced by the inferred label.
    std::vector<Dialog> corpus;
    std::size_t rows = 0;
    std::size_t rows_with_gold = 0;
    std::size_t agreeing = 0;
    std::size_t unmatched = 0;  // rows no rule covers
    std::vector<Divergence> divergences;
};

CorpusInference infer_corpus(std::span<const Dialog> corpus);

enum class PointKind { Introduction, Change };

std::string_view to_string(PointKind k) noexcept;

struct PointOfInterest {
    std::string event_id;
    TurnIndex turn = 0;
    PointKind kind = PointKind::Introduction;
    AnnotationState state;

    friend bool operator==(const PointOfInterest&, const PointOfInterest&) = default;
};

// The first row is the introduction; every later row whose four labels differ
// from the previous row is a change.
std::vector<PointOfInterest> detect_points(const EventTimeline& event);

}  // namespace ctom
