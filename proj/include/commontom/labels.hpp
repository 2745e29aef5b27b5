#pragma once

// Closed label enumerations shared by every module: belief labels, common
// ground labels, question certainty and the two discourse participants.
//
// String forms are the exact corpus spellings; parsing anything else fails.

#include <array>
#include <optional>
#include <string_view>

namespace ctom {

enum class BeliefLabel {
    CertainlyTrue,  // CT+
    Possibly,       // PS
    CertainlyNot,   // CT-
    NoBelief,       // NB
};

enum class CGLabel {
    JustAdded,  // JA
    In,         // IN
    Rejected,   // RT
    NotAnnotated,  // NA
};

enum class Certainty {
    Certainly,
    Possibly,
    CertainlyNot,
};

enum class Speaker { A, B };

inline constexpr std::array<BeliefLabel, 4> kAllBeliefs = {
    BeliefLabel::CertainlyTrue, BeliefLabel::Possibly, BeliefLabel::CertainlyNot,
    BeliefLabel::NoBelief};

inline constexpr std::array<CGLabel, 4> kAllCGLabels = {
    CGLabel::JustAdded, CGLabel::In, CGLabel::Rejected, CGLabel::NotAnnotated};

// Order in which certainties are instantiated per chain.
inline constexpr std::array<Certainty, 3> kAllCertainties = {
    Certainty::Certainly, Certainty::Possibly, Certainty::CertainlyNot};

constexpr Speaker other(Speaker s) noexcept {
    return s == Speaker::A ? Speaker::B : Speaker::A;
}

constexpr std::string_view to_string(BeliefLabel b) noexcept {
    switch (b) {
    case BeliefLabel::CertainlyTrue: return "CT+";
    case BeliefLabel::Possibly: return "PS";
    case BeliefLabel::CertainlyNot: return "CT-";
    case BeliefLabel::NoBelief: return "NB";
    }
    return "?";
}

constexpr std::string_view to_string(CGLabel c) noexcept {
    switch (c) {
    case CGLabel::JustAdded: return "JA";
    case CGLabel::In: return "IN";
    case CGLabel::Rejected: return "RT";
    case CGLabel::NotAnnotated: return "NA";
    }
    return "?";
}

// "certainly", "possibly", "certainly not" -- used verbatim in rendered
// questions and on the wire.
constexpr std::string_view to_string(Certainty c) noexcept {
    switch (c) {
    case Certainty::Certainly: return "certainly";
    case Certainty::Possibly: return "possibly";
    case Certainty::CertainlyNot: return "certainly not";
    }
    return "?";
}

constexpr char to_char(Speaker s) noexcept { return s == Speaker::A ? 'A' : 'B'; }
constexpr std::string_view to_string(Speaker s) noexcept {
    return s == Speaker::A ? "A" : "B";
}

std::optional<BeliefLabel> parse_belief(std::string_view s) noexcept;
std::optional<CGLabel> parse_cg(std::string_view s) noexcept;
std::optional<Certainty> parse_certainty(std::string_view s) noexcept;
std::optional<Speaker> parse_speaker(std::string_view s) noexcept;

// CERTAINLY <-> CT+, POSSIBLY <-> PS, CERTAINLY_NOT <-> CT-.
constexpr BeliefLabel as_belief(Certainty c) noexcept {
    switch (c) {
    case Certainty::Certainly: return BeliefLabel::CertainlyTrue;
    case Certainty::Possibly: return BeliefLabel::Possibly;
    case Certainty::CertainlyNot: return BeliefLabel::CertainlyNot;
    }
    return BeliefLabel::NoBelief;
}

// NB has no certainty counterpart.
constexpr std::optional<Certainty> as_certainty(BeliefLabel b) noexcept {
    switch (b) {
    case BeliefLabel::CertainlyTrue: return Certainty::Certainly;
    case BeliefLabel::Possibly: return Certainty::Possibly;
    case BeliefLabel::CertainlyNot: return Certainty::CertainlyNot;
    case BeliefLabel::NoBelief: return std::nullopt;
    }
    return std::nullopt;
}

// Belief and CG labels of both participants for one event at one turn.
struct AnnotationState {
    BeliefLabel bel_a = BeliefLabel::NoBelief;
    BeliefLabel bel_b = BeliefLabel::NoBelief;
    CGLabel cg_a = CGLabel::NotAnnotated;
    CGLabel cg_b = CGLabel::NotAnnotated;

    constexpr BeliefLabel bel(Speaker s) const noexcept {
        return s == Speaker::A ? bel_a : bel_b;
    }
    constexpr CGLabel cg(Speaker s) const noexcept {
        return s == Speaker::A ? cg_a : cg_b;
    }

    friend constexpr bool operator==(const AnnotationState&,
                                     const AnnotationState&) = default;
};

}  // namespace ctom
