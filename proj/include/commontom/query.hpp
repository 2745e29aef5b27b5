#pragma once

#include <optional>
#include <string>
#include <vector>

#include "commontom/corpus.hpp"
#include "commontom/labels.hpp"

namespace ctom {

// One yes/no belief question anchored at a turn. The chain lists believers
// from the outermost inward; its length is the question's order.
struct Query {
    std::string query_id;
    std::string dialog_id;
    std::string event_id;
    TurnIndex anchor_turn = 0;
    std::vector<Speaker> chain;
    Certainty certainty = Certainty::Certainly;
    std::string text;
    // nullopt: not yet resolved.
    std::optional<bool> gold;

    int order() const noexcept { return static_cast<int>(chain.size()); }

    friend bool operator==(const Query&, const Query&) = default;
};

// "AB", "BAB", ...
std::string chain_letters(const std::vector<Speaker>& chain);

// {dialog_id}/{event_id}/{anchor_turn}/{chain letters}/{certainty}
std::string make_query_id(const std::string& dialog_id, const std::string& event_id,
                          TurnIndex anchor_turn, const std::vector<Speaker>& chain,
                          Certainty certainty);

}  // namespace ctom
