#include "commontom/labels.hpp"

namespace ctom {

std::optional<BeliefLabel> parse_belief(std::string_view s) noexcept {
    for (auto b : kAllBeliefs)
        if (to_string(b) == s) return b;
    return std::nullopt;
}

std::optional<CGLabel> parse_cg(std::string_view s) noexcept {
    for (auto c : kAllCGLabels)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

std::optional<Certainty> parse_certainty(std::string_view s) noexcept {
    for (auto c : kAllCertainties)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

std::optional<Speaker> parse_speaker(std::string_view s) noexcept {
    if (s == "A") return Speaker::A;
    if (s == "B") return Speaker::B;
    return std::nullopt;
}

}  // namespace ctom
