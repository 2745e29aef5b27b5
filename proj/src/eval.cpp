#include "commontom/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_map>

#include <json.hpp>

#include "commontom/error.hpp"
#include "commontom/hashing.hpp"

namespace ctom {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Tally {
    std::size_t total = 0;
    std::size_t correct = 0;
};

struct PropositionTally {
    std::array<Tally, 3> by_order;
    bool all_correct = true;
};

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport score(std::span<const Query> queries, std::span<const Prediction> preds) {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (!queries[i].gold)
            throw Error(ErrorKind::InvalidArgument, queries[i].query_id + " has no gold answer");
        if (queries[i].order() < 1 || queries[i].order() > 3)
            throw Error(ErrorKind::InvalidArgument, queries[i].query_id + " has invalid order");
        index.emplace(queries[i].query_id, i);
    }

    std::vector<const Prediction*> by_query(queries.size(), nullptr);
    for (const auto& p : preds) {
        auto it = index.find(p.query_id);
        if (it == index.end())
            throw Error(ErrorKind::NotFound, "prediction for unknown query \"" + p.query_id + "\"");
        if (by_query[it->second])
            throw Error(ErrorKind::InvalidArgument,
                        "duplicate prediction for \"" + p.query_id + "\"");
        by_query[it->second] = &p;
    }

    MetricsReport rep;
    std::array<Tally, 3> orders{};
    std::map<std::pair<std::string, std::string>, PropositionTally> props;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto& q = queries[i];
        const auto* p = by_query[i];
        ++rep.counts.total;
        bool correct = false;
        if (!p || !p->answer) {
            ++rep.counts.unanswered;
            if (p) ++rep.counts.unparseable;
        } else {
            ++rep.counts.answered;
            correct = *p->answer == *q.gold;
        }
        if (correct) ++rep.counts.correct;
        auto o = static_cast<std::size_t>(q.order() - 1);
        ++orders[o].total;
        orders[o].correct += correct;
        auto& prop = props[{q.dialog_id, q.event_id}];
        ++prop.by_order[o].total;
        prop.by_order[o].correct += correct;
        prop.all_correct = prop.all_correct && correct;
    }

    rep.total_accuracy = ratio(rep.counts.correct, rep.counts.total);
    for (std::size_t o = 0; o < 3; ++o) {
        rep.per_order_accuracy[o] = ratio(orders[o].correct, orders[o].total);
        rep.per_order_total[o] = orders[o].total;
    }

    rep.propositions = props.size();
    std::size_t consistent = 0;
    for (const auto& [key, t] : props) consistent += t.all_correct;
    rep.consistency = ratio(consistent, props.size());

    for (std::size_t k = 0; k < kOrderPairs.size(); ++k) {
        auto [oi, oj] = kOrderPairs[k];
        std::vector<double> xs, ys;
        for (const auto& [key, t] : props) {
            const auto& ti = t.by_order[static_cast<std::size_t>(oi - 1)];
            const auto& tj = t.by_order[static_cast<std::size_t>(oj - 1)];
            if (ti.total == 0 || tj.total == 0) continue;
            xs.push_back(*ratio(ti.correct, ti.total));
            ys.push_back(*ratio(tj.correct, tj.total));
        }
        rep.correlation_n[k] = xs.size();
        if (xs.size() >= 2) rep.correlations[k] = pearson(xs, ys);
    }
    return rep;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw Error(ErrorKind::InvalidArgument, "pearson: inputs differ in length");
    if (xs.size() < 2) throw Error(ErrorKind::InvalidArgument, "pearson: need at least 2 points");
    const auto n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

BaselineReport random_baseline(std::span<const Query> queries, double p_yes, double p_no,
                               std::uint64_t seed, std::size_t trials) {
    if (trials < 1) throw Error(ErrorKind::InvalidArgument, "baseline needs at least one trial");
    if (!(p_yes >= 0 && p_no >= 0) || std::abs(p_yes + p_no - 1.0) > 1e-9)
        throw Error(ErrorKind::InvalidArgument, "answer frequencies must be non-negative and sum to 1");

    BaselineReport rep;
    rep.p_yes = p_yes;
    rep.seed = seed;
    rep.trials = trials;
    std::array<YesNo, 3> per_order{};
    std::vector<bool> gold;
    gold.reserve(queries.size());
    for (const auto& q : queries) {
        if (!q.gold) throw Error(ErrorKind::InvalidArgument, q.query_id + " has no gold answer");
        gold.push_back(*q.gold);
        auto& c = per_order.at(static_cast<std::size_t>(q.order() - 1));
        (*q.gold ? c.yes : c.no) += 1;
        (*q.gold ? rep.gold_yes : rep.gold_no) += 1;
    }
    rep.n = gold.size();
    auto expectation = [&](std::size_t yes, std::size_t no) -> std::optional<double> {
        if (yes + no == 0) return std::nullopt;
        double n = static_cast<double>(yes + no);
        return p_yes * static_cast<double>(yes) / n + p_no * static_cast<double>(no) / n;
    };
    rep.expected = expectation(rep.gold_yes, rep.gold_no).value_or(0.0);
    for (std::size_t o = 0; o < 3; ++o)
        rep.expected_per_order[o] = expectation(per_order[o].yes, per_order[o].no);

    if (gold.empty()) return rep;
    std::mt19937_64 rng(mix64(seed));
    double sum = 0, sumsq = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t correct = 0;
        for (bool g : gold) {
            bool guess = unit_interval(rng()) < p_yes;
            correct += guess == g;
        }
        double acc = static_cast<double>(correct) / static_cast<double>(gold.size());
        sum += acc;
        sumsq += acc * acc;
    }
    auto nt = static_cast<double>(trials);
    rep.mc_mean = sum / nt;
    rep.mc_stddev = trials > 1 ? std::sqrt(std::max(0.0, (sumsq - sum * sum / nt) / (nt - 1))) : 0.0;
    return rep;
}

std::map<Split, YesNo> split_counts(std::span<const Query> queries,
                                    const std::map<std::string, Split>& splits) {
    std::map<Split, YesNo> out{{Split::Train, {}}, {Split::Test, {}}, {Split::None, {}}};
    for (const auto& q : queries) {
        if (!q.gold) continue;
        auto it = splits.find(q.dialog_id);
        auto split = it == splits.end() ? Split::None : it->second;
        (*q.gold ? out[split].yes : out[split].no) += 1;
    }
    return out;
}

std::map<std::string, Split> dialog_splits(std::span<const Dialog> corpus) {
    std::map<std::string, Split> out;
    for (const auto& d : corpus) out[d.dialog_id] = d.split;
    return out;
}

void write_predictions(std::ostream& out, std::span<const Prediction> preds) {
    for (const auto& p : preds) {
        ordered_json rec;
        rec["query_id"] = p.query_id;
        if (p.answer) rec["answer"] = *p.answer ? "yes" : "no";
        else rec["answer"] = nullptr;
        if (p.raw) rec["raw"] = *p.raw;
        out << rec.dump() << '\n';
    }
}

std::vector<Prediction> parse_predictions(std::istream& in) {
    std::vector<Prediction> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(line, std::string("malformed JSON: ") + e.what());
        }
        if (!rec.is_object()) throw ParseError(line, "record must be a JSON object");
        Prediction p;
        auto id = rec.find("query_id");
        if (id == rec.end() || !id->is_string())
            throw ParseError(line, "field \"query_id\" must be a string");
        p.query_id = id->get<std::string>();
        auto ans = rec.find("answer");
        if (ans == rec.end()) throw ParseError(line, "missing field \"answer\"");
        if (!ans->is_null()) {
            auto s = ans->is_string() ? ans->get<std::string>() : std::string();
            if (s == "yes") p.answer = true;
            else if (s == "no") p.answer = false;
            else throw ParseError(line, "answer must be \"yes\", \"no\" or null");
        }
        if (auto raw = rec.find("raw"); raw != rec.end() && raw->is_string())
            p.raw = raw->get<std::string>();
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Prediction> load_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open predictions \"" + path + "\"");
    return parse_predictions(in);
}

}  // namespace ctom
