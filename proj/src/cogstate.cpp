#include "commontom/cogstate.hpp"

#include "commontom/error.hpp"

namespace ctom {

namespace {

bool positive_pair(BeliefLabel a, BeliefLabel b) {
    return infer_cg(a, b).ja_in_underdetermined;
}

}  // namespace

CGInference infer_cg(BeliefLabel bel_a, BeliefLabel bel_b) noexcept {
    using B = BeliefLabel;
    CGInference out;
    if (bel_a == B::CertainlyNot || bel_b == B::CertainlyNot) {
        out.cg = CGLabel::Rejected;
        out.rule = 1;
    } else if (bel_a == B::CertainlyTrue && bel_b == B::CertainlyTrue) {
        out.cg = CGLabel::JustAdded;
        out.ja_in_underdetermined = true;
        out.rule = 2;
    } else if (bel_a == B::Possibly && bel_b == B::CertainlyTrue) {
        out.cg = CGLabel::JustAdded;
        out.ja_in_underdetermined = true;
        out.rule = 3;
    } else if (bel_a == B::CertainlyTrue && bel_b == B::Possibly) {
        out.cg = CGLabel::JustAdded;
        out.ja_in_underdetermined = true;
        out.rule = 4;
    } else if (bel_a == B::NoBelief || bel_b == B::NoBelief) {
        out.rule = 5;
    } else {
        out.diagnostic = std::string("no rule covers beliefs ") +
                         std::string(to_string(bel_a)) + "/" + std::string(to_string(bel_b));
    }
    return out;
}

CGLabel resolve_ja_in(const CGInference& inference, const EventTimeline& event,
                      TurnIndex turn) {
    if (!inference.ja_in_underdetermined)
        throw Error(ErrorKind::InvalidArgument, "inference is not JA/IN-underdetermined");
    if (event.rows.empty() || turn < event.rows.front().turn)
        throw Error(ErrorKind::NotFound, "turn " + std::to_string(turn) +
                                             " is not covered by event \"" + event.event_id +
                                             "\"");
    for (const auto& r : event.rows) {
        if (r.turn > turn) break;
        if (positive_pair(r.state.bel_a, r.state.bel_b))
            return r.turn == turn ? CGLabel::JustAdded : CGLabel::In;
    }
    throw Error(ErrorKind::InvalidArgument,
                "event \"" + event.event_id + "\" has no positive belief row at or before turn " +
                    std::to_string(turn));
}

std::vector<InferredRow> infer_timeline(const EventTimeline& event) {
    std::vector<InferredRow> out;
    out.reserve(event.rows.size());
    bool seen_positive = false;
    for (const auto& r : event.rows) {
        InferredRow row{r.turn, infer_cg(r.state.bel_a, r.state.bel_b), CGLabel::NotAnnotated};
        if (row.inference.ja_in_underdetermined) {
            row.cg = seen_positive ? CGLabel::In : CGLabel::JustAdded;
            seen_positive = true;
        } else if (row.inference.cg) {
            row.cg = *row.inference.cg;
        }
        out.push_back(std::move(row));
    }
    return out;
}

CorpusInference infer_corpus(std::span<const Dialog> corpus) {
    CorpusInference out;
    out.corpus.assign(corpus.begin(), corpus.end());
    for (auto& d : out.corpus) {
        for (auto& e : d.events) {
            auto inferred = infer_timeline(e);
            for (std::size_t i = 0; i < e.rows.size(); ++i) {
                auto& row = e.rows[i];
                const auto& inf = inferred[i];
                ++out.rows;
                if (inf.inference.rule == 0) ++out.unmatched;
                if (row.has_cg) {
                    ++out.rows_with_gold;
                    if (row.state.cg_a == inf.cg && row.state.cg_b == inf.cg) {
                        ++out.agreeing;
                    } else {
                        out.divergences.push_back({d.dialog_id, e.event_id, row.turn, row.state,
                                                   inf.cg, inf.inference.rule,
                                                   inf.inference.diagnostic});
                    }
                }
                row.state.cg_a = inf.cg;
                row.state.cg_b = inf.cg;
                row.has_cg = true;
            }
        }
    }
    return out;
}

std::string_view to_string(PointKind k) noexcept {
    return k == PointKind::Introduction ? "introduction" : "change";
}

std::vector<PointOfInterest> detect_points(const EventTimeline& event) {
    std::vector<PointOfInterest> out;
    for (std::size_t i = 0; i < event.rows.size(); ++i) {
        const auto& r = event.rows[i];
        if (i == 0) {
            out.push_back({event.event_id, r.turn, PointKind::Introduction, r.state});
        } else if (r.state != event.rows[i - 1].state) {
            out.push_back({event.event_id, r.turn, PointKind::Change, r.state});
        }
    }
    return out;
}

}  // namespace ctom
