#include "commontom/querygen.hpp"

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "commontom/answers.hpp"
#include "commontom/error.hpp"
#include "commontom/hashing.hpp"
#include "commontom/version.hpp"

namespace ctom {

using nlohmann::json;
using nlohmann::ordered_json;

const std::array<std::vector<Speaker>, 6>& question_chains() {
    using S = Speaker;
    static const std::array<std::vector<Speaker>, 6> chains = {{
        {S::A},
        {S::B},
        {S::A, S::B},
        {S::B, S::A},
        {S::A, S::B, S::A},
        {S::B, S::A, S::B},
    }};
    return chains;
}

std::string render_question(std::span<const Speaker> chain, Certainty certainty,
                            std::string_view proposition) {
    check_chain(chain);
    std::string out = "At the time indicated, is it the case that ";
    for (auto s : chain) {
        out += to_char(s);
        out += " believes that ";
    }
    out += "it is ";
    out += to_string(certainty);
    out += " true that ";
    out += proposition;
    out += '?';
    return out;
}

std::vector<Query> generate_for_point(const std::string& dialog_id, const EventTimeline& event,
                                      const PointOfInterest& point) {
    std::vector<Query> out;
    out.reserve(18);
    for (const auto& chain : question_chains()) {
        for (auto c : kAllCertainties) {
            Query q;
            q.query_id = make_query_id(dialog_id, event.event_id, point.turn, chain, c);
            q.dialog_id = dialog_id;
            q.event_id = event.event_id;
            q.anchor_turn = point.turn;
            q.chain = chain;
            q.certainty = c;
            q.text = render_question(chain, c, event.proposition);
            q.gold = resolve(c, chain, point.state);
            out.push_back(std::move(q));
        }
    }
    return out;
}

bool is_majority(const AnnotationState& s) noexcept {
    return s.bel_a == BeliefLabel::CertainlyTrue && s.bel_b == BeliefLabel::CertainlyTrue &&
           s.cg_a == CGLabel::JustAdded && s.cg_b == CGLabel::JustAdded;
}

namespace {

std::mt19937_64 event_stream(std::uint64_t seed, const std::string& dialog_id,
                             const std::string& event_id) {
    auto key = fnv1a64(event_id, fnv1a64("\x1f", fnv1a64(dialog_id)));
    return std::mt19937_64(mix64(seed ^ key));
}

}  // namespace

std::vector<AnchoredPoint> sample_majority(std::span<const AnchoredPoint> points, double rate,
                                           std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "sampling rate must lie in [0, 1]");
    std::vector<AnchoredPoint> kept;
    std::map<std::pair<std::string, std::string>, std::mt19937_64> streams;
    for (const auto& p : points) {
        if (!is_majority(p.point.state)) {
            kept.push_back(p);
            continue;
        }
        auto key = std::pair{p.dialog_id, p.point.event_id};
        auto it = streams.find(key);
        if (it == streams.end())
            it = streams.emplace(key, event_stream(seed, p.dialog_id, p.point.event_id)).first;
        if (unit_interval(it->second()) < rate) kept.push_back(p);
    }
    return kept;
}

std::vector<AnchoredPoint> collect_points(std::span<const Dialog> corpus) {
    std::vector<AnchoredPoint> out;
    for (const auto& d : corpus)
        for (const auto& e : d.events)
            for (auto& p : detect_points(e)) out.push_back({d.dialog_id, &e, std::move(p)});
    return out;
}

QuerySet build_benchmark(std::span<const Dialog> corpus, double rate, std::uint64_t seed) {
    QuerySet set;
    set.provenance = {kToolVersion, content_hash(serialize_corpus(corpus)), seed, rate};
    auto points = collect_points(corpus);
    for (const auto& p : sample_majority(points, rate, seed)) {
        auto qs = generate_for_point(p.dialog_id, *p.event, p.point);
        set.queries.insert(set.queries.end(), std::make_move_iterator(qs.begin()),
                           std::make_move_iterator(qs.end()));
    }
    return set;
}

void fill_gold(std::vector<Query>& queries, std::span<const Dialog> corpus) {
    for (auto& q : queries) {
        const Dialog* dialog = nullptr;
        for (const auto& d : corpus)
            if (d.dialog_id == q.dialog_id) dialog = &d;
        if (!dialog) throw Error(ErrorKind::NotFound, q.query_id + ": unknown dialog");
        const auto* event = dialog->find_event(q.event_id);
        if (!event) throw Error(ErrorKind::NotFound, q.query_id + ": unknown event");
        auto state = event->state_at(q.anchor_turn);
        if (!state)
            throw Error(ErrorKind::NotFound,
                        q.query_id + ": no annotation at or before the anchor turn");
        q.gold = resolve(q, *state);
    }
}

void write_benchmark(std::ostream& out, std::span<const Query> queries) {
    for (const auto& q : queries) {
        ordered_json rec;
        rec["query_id"] = q.query_id;
        rec["dialog_id"] = q.dialog_id;
        rec["event_id"] = q.event_id;
        rec["anchor_turn"] = q.anchor_turn;
        rec["order"] = q.order();
        json chain = json::array();
        for (auto s : q.chain) chain.push_back(to_string(s));
        rec["chain"] = chain;
        rec["certainty"] = to_string(q.certainty);
        rec["question"] = q.text;
        if (q.gold) rec["gold"] = *q.gold ? "yes" : "no";
        out << rec.dump() << '\n';
    }
}

std::string serialize_benchmark(std::span<const Query> queries) {
    std::ostringstream out;
    write_benchmark(out, queries);
    return out.str();
}

namespace {

std::string str_field(const json& rec, const char* key, std::size_t line) {
    auto it = rec.find(key);
    if (it == rec.end() || !it->is_string())
        throw ParseError(line, std::string("field \"") + key + "\" must be a string");
    return it->get<std::string>();
}

std::int64_t int_field(const json& rec, const char* key, std::size_t line) {
    auto it = rec.find(key);
    if (it == rec.end() || !it->is_number_integer())
        throw ParseError(line, std::string("field \"") + key + "\" must be an integer");
    return it->get<std::int64_t>();
}

}  // namespace

std::vector<Query> parse_benchmark(std::istream& in) {
    std::vector<Query> out;
    std::unordered_set<std::string> ids;
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
        Query q;
        q.query_id = str_field(rec, "query_id", line);
        q.dialog_id = str_field(rec, "dialog_id", line);
        q.event_id = str_field(rec, "event_id", line);
        q.anchor_turn = int_field(rec, "anchor_turn", line);
        auto order = int_field(rec, "order", line);
        auto chain = rec.find("chain");
        if (chain == rec.end() || !chain->is_array())
            throw ParseError(line, "field \"chain\" must be an array");
        for (const auto& s : *chain) {
            auto sp = s.is_string() ? parse_speaker(s.get<std::string>()) : std::nullopt;
            if (!sp) throw ParseError(line, "chain entries must be \"A\" or \"B\"");
            q.chain.push_back(*sp);
        }
        if (order != static_cast<std::int64_t>(q.chain.size()))
            throw ParseError(line, "order does not match chain length");
        try {
            check_chain(q.chain);
        } catch (const Error& e) {
            throw ParseError(line, e.what());
        }
        auto cert = str_field(rec, "certainty", line);
        auto c = parse_certainty(cert);
        if (!c) throw ParseError(line, "unknown certainty \"" + cert + "\"");
        q.certainty = *c;
        q.text = str_field(rec, "question", line);
        if (auto g = rec.find("gold"); g != rec.end() && !g->is_null()) {
            auto gs = g->is_string() ? g->get<std::string>() : std::string();
            if (gs == "yes") q.gold = true;
            else if (gs == "no") q.gold = false;
            else throw ParseError(line, "gold must be \"yes\" or \"no\"");
        }
        if (!ids.insert(q.query_id).second)
            throw ParseError(line, "duplicate query_id \"" + q.query_id + "\"");
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<Query> load_benchmark(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open benchmark \"" + path + "\"");
    return parse_benchmark(in);
}

}  // namespace ctom
