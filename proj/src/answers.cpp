#include "commontom/answers.hpp"

#include "commontom/error.hpp"

namespace ctom {

namespace {

bool positive(Certainty c) noexcept {
    return c == Certainty::Certainly || c == Certainty::Possibly;
}

bool in_common_ground(CGLabel c) noexcept {
    return c == CGLabel::JustAdded || c == CGLabel::In;
}

}  // namespace

std::string chain_letters(const std::vector<Speaker>& chain) {
    std::string s;
    for (auto sp : chain) s += to_char(sp);
    return s;
}

std::string make_query_id(const std::string& dialog_id, const std::string& event_id,
                          TurnIndex anchor_turn, const std::vector<Speaker>& chain,
                          Certainty certainty) {
    return dialog_id + "/" + event_id + "/" + std::to_string(anchor_turn) + "/" +
           chain_letters(chain) + "/" + std::string(to_string(certainty));
}

bool resolve_first(Certainty asked, Speaker believer, const AnnotationState& state) noexcept {
    return subsumes(asked, state.bel(believer));
}

bool resolve_second(Certainty asked, Speaker outer, Speaker inner,
                    const AnnotationState& state) noexcept {
    if (positive(asked) && in_common_ground(state.cg(outer)) && subsumes(asked, state.bel(outer)))
        return true;
    return asked == Certainty::CertainlyNot && state.cg(outer) == CGLabel::Rejected &&
           state.bel(inner) == BeliefLabel::CertainlyNot;
}

bool resolve_third(Certainty asked, Speaker outer, Speaker /*inner*/,
                   const AnnotationState& state) noexcept {
    if (positive(asked) && in_common_ground(state.cg(outer)) && subsumes(asked, state.bel(outer)))
        return true;
    // Unlike second order, a not-yet-annotated CG also admits the negative case.
    auto cg = state.cg(outer);
    return asked == Certainty::CertainlyNot &&
           (cg == CGLabel::Rejected || cg == CGLabel::NotAnnotated) &&
           state.bel(outer) == BeliefLabel::CertainlyNot;
}

void check_chain(std::span<const Speaker> chain) {
    if (chain.empty() || chain.size() > 3)
        throw Error(ErrorKind::InvalidArgument,
                    "belief chain must have 1-3 elements, got " + std::to_string(chain.size()));
    for (std::size_t i = 1; i < chain.size(); ++i) {
        if (chain[i] == chain[i - 1])
            throw Error(ErrorKind::InvalidArgument,
                        "belief chain asks about self-belief at position " + std::to_string(i));
    }
}

bool resolve(Certainty asked, std::span<const Speaker> chain, const AnnotationState& state) {
    check_chain(chain);
    switch (chain.size()) {
    case 1: return resolve_first(asked, chain[0], state);
    case 2: return resolve_second(asked, chain[0], chain[1], state);
    default: return resolve_third(asked, chain[0], chain[1], state);
    }
}

bool resolve(const Query& query, const AnnotationState& state) {
    return resolve(query.certainty, query.chain, state);
}

}  // namespace ctom
