#include "commontom/reports.hpp"

#include "commontom/version.hpp"

namespace ctom {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

ordered_json state_json(const AnnotationState& s) {
    return {{"bel_a", to_string(s.bel_a)},
            {"bel_b", to_string(s.bel_b)},
            {"cg_a", to_string(s.cg_a)},
            {"cg_b", to_string(s.cg_b)}};
}

}  // namespace

ordered_json to_json(const Provenance& p) {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = p.tool_version;
    j["corpus_hash"] = p.corpus_hash;
    j["seed"] = p.seed;
    j["rate"] = p.rate;
    return j;
}

ordered_json to_json(const MetricsReport& r) {
    ordered_json j;
    j["total_accuracy"] = opt(r.total_accuracy);
    ordered_json per_order;
    for (std::size_t o = 0; o < 3; ++o) per_order[std::to_string(o + 1)] = opt(r.per_order_accuracy[o]);
    j["per_order_accuracy"] = per_order;
    ordered_json per_order_n;
    for (std::size_t o = 0; o < 3; ++o) per_order_n[std::to_string(o + 1)] = r.per_order_total[o];
    j["per_order_total"] = per_order_n;
    j["consistency"] = opt(r.consistency);
    j["propositions"] = r.propositions;
    j["proposition_key"] = "dialog_id/event_id, aggregated over anchor turns";
    ordered_json corr, corr_n;
    for (std::size_t k = 0; k < kOrderPairs.size(); ++k) {
        auto key = std::to_string(kOrderPairs[k].first) + "-" + std::to_string(kOrderPairs[k].second);
        corr[key] = opt(r.correlations[k]);
        corr_n[key] = r.correlation_n[k];
    }
    j["correlations"] = corr;
    j["correlation_n"] = corr_n;
    j["counts"] = {{"total", r.counts.total},
                   {"answered", r.counts.answered},
                   {"unanswered", r.counts.unanswered},
                   {"unparseable", r.counts.unparseable},
                   {"correct", r.counts.correct}};
    return j;
}

ordered_json to_json(const BaselineReport& r) {
    ordered_json j;
    j["p_yes"] = r.p_yes;
    j["p_no"] = 1.0 - r.p_yes;
    j["n"] = r.n;
    j["gold_yes"] = r.gold_yes;
    j["gold_no"] = r.gold_no;
    j["expected_accuracy"] = r.expected;
    ordered_json per_order;
    for (std::size_t o = 0; o < 3; ++o) per_order[std::to_string(o + 1)] = opt(r.expected_per_order[o]);
    j["expected_per_order"] = per_order;
    j["seed"] = r.seed;
    j["trials"] = r.trials;
    j["mc_mean"] = r.mc_mean;
    j["mc_stddev"] = r.mc_stddev;
    return j;
}

ordered_json to_json(const std::map<Split, YesNo>& counts) {
    ordered_json j;
    for (auto split : {Split::Train, Split::Test, Split::None}) {
        auto it = counts.find(split);
        YesNo c = it == counts.end() ? YesNo{} : it->second;
        j[std::string(to_string(split))] = {{"yes", c.yes}, {"no", c.no}};
    }
    return j;
}

ordered_json validation_report(std::span<const Dialog> corpus) {
    ordered_json j;
    j["dialogs"] = corpus.size();
    ordered_json list = ordered_json::array();
    for (const auto& d : corpus) {
        for (const auto& v : validate_dialog(d)) {
            ordered_json item;
            item["dialog_id"] = v.dialog_id;
            item["event_id"] = v.event_id.empty() ? json(nullptr) : json(v.event_id);
            item["turn"] = v.turn ? json(*v.turn) : json(nullptr);
            item["rule"] = v.rule;
            item["detail"] = v.detail;
            list.push_back(item);
        }
    }
    j["violations"] = list;
    return j;
}

ordered_json divergence_report(const CorpusInference& inference) {
    ordered_json j;
    j["rows"] = inference.rows;
    j["rows_with_gold"] = inference.rows_with_gold;
    j["agreeing"] = inference.agreeing;
    j["diverging"] = inference.divergences.size();
    j["no_rule"] = inference.unmatched;
    ordered_json list = ordered_json::array();
    for (const auto& d : inference.divergences) {
        ordered_json item;
        item["dialog_id"] = d.dialog_id;
        item["event_id"] = d.event_id;
        item["turn"] = d.turn;
        item["gold"] = state_json(d.gold);
        item["inferred"] = to_string(d.inferred);
        item["rule"] = d.rule;
        if (!d.diagnostic.empty()) item["diagnostic"] = d.diagnostic;
        list.push_back(item);
    }
    j["divergences"] = list;
    return j;
}

}  // namespace ctom
