#pragma once

// Gold yes/no resolution for first-, second- and third-order belief questions
// from the annotation state at the anchor turn.
//
// The outermost believer of the chain plays "speaker 1": its belief and CG
// label drive the decision. Second order consults the inner believer's belief
// only for negative (certainly not) questions; third order never does. The
// inner believer's CG label is never used. Everything not covered is "no".

#include <span>

#include "commontom/labels.hpp"
#include "commontom/query.hpp"

namespace ctom {

// A question probing `asked` is satisfied by belief `held`: equal labels, or
// the question asks "possibly" and the belief is CT+.
constexpr bool subsumes(Certainty asked, BeliefLabel held) noexcept {
    auto q = as_belief(asked);
    return q == held || (q == BeliefLabel::Possibly && held == BeliefLabel::CertainlyTrue);
}

bool resolve_first(Certainty asked, Speaker believer, const AnnotationState& state) noexcept;

// outer believes that inner believes ...
bool resolve_second(Certainty asked, Speaker outer, Speaker inner,
                    const AnnotationState& state) noexcept;

// outer believes that inner believes that outer believes ...
bool resolve_third(Certainty asked, Speaker outer, Speaker inner,
                   const AnnotationState& state) noexcept;

// Dispatch on chain length. Throws InvalidArgument for an empty, too long or
// non-alternating chain.
bool resolve(Certainty asked, std::span<const Speaker> chain, const AnnotationState& state);
bool resolve(const Query& query, const AnnotationState& state);

// Throws InvalidArgument unless the chain has 1-3 elements and no speaker
// directly follows itself.
void check_chain(std::span<const Speaker> chain);

}  // namespace ctom
