#include "commontom/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "commontom/error.hpp"

namespace ctom {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Split s) noexcept {
    switch (s) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::None: return "none";
    }
    return "none";
}

std::optional<Split> parse_split(std::string_view s) noexcept {
    if (s == "train") return Split::Train;
    if (s == "test") return Split::Test;
    if (s == "none") return Split::None;
    return std::nullopt;
}

std::optional<AnnotationState> EventTimeline::state_at(TurnIndex turn) const {
    auto it = std::upper_bound(rows.begin(), rows.end(), turn,
                               [](TurnIndex t, const EventRow& r) { return t < r.turn; });
    if (it == rows.begin()) return std::nullopt;
    return std::prev(it)->state;
}

const EventRow* EventTimeline::row_at(TurnIndex turn) const {
    for (const auto& r : rows)
        if (r.turn == turn) return &r;
    return nullptr;
}

const Turn* Dialog::find_turn(TurnIndex index) const {
    auto it = std::lower_bound(turns.begin(), turns.end(), index,
                               [](const Turn& t, TurnIndex i) { return t.index < i; });
    if (it != turns.end() && it->index == index) return &*it;
    // turns may be unsorted in a hand-built dialog
    for (const auto& t : turns)
        if (t.index == index) return &t;
    return nullptr;
}

const EventTimeline* Dialog::find_event(std::string_view event_id) const {
    for (const auto& e : events)
        if (e.event_id == event_id) return &e;
    return nullptr;
}

namespace {

const json& field(const json& rec, const char* key, std::size_t line) {
    auto it = rec.find(key);
    if (it == rec.end()) throw ParseError(line, std::string("missing field \"") + key + "\"");
    return *it;
}

std::string get_string(const json& rec, const char* key, std::size_t line) {
    const json& v = field(rec, key, line);
    if (!v.is_string())
        throw ParseError(line, std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

TurnIndex get_index(const json& rec, const char* key, std::size_t line) {
    const json& v = field(rec, key, line);
    if (!v.is_number_integer())
        throw ParseError(line, std::string("field \"") + key + "\" must be an integer");
    auto i = v.get<std::int64_t>();
    if (i < 0)
        throw ParseError(line, std::string("field \"") + key + "\" must be non-negative");
    return i;
}

BeliefLabel get_belief(const json& rec, const char* key, std::size_t line) {
    auto s = get_string(rec, key, line);
    auto b = parse_belief(s);
    if (!b) throw ParseError(line, "unknown belief label \"" + s + "\" in \"" + key + "\"");
    return *b;
}

CGLabel get_cg(const json& rec, const char* key, std::size_t line) {
    auto s = get_string(rec, key, line);
    auto c = parse_cg(s);
    if (!c) throw ParseError(line, "unknown CG label \"" + s + "\" in \"" + key + "\"");
    return *c;
}

struct PendingDialog {
    Dialog dialog;
    bool has_meta = false;
    std::map<TurnIndex, std::size_t> turn_lines;
    // (event index, turn) -> line
    std::map<std::pair<std::size_t, TurnIndex>, std::size_t> row_lines;
};

class CorpusBuilder {
public:
    void add_line(std::string_view text, std::size_t line) {
        json rec;
        try {
            rec = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(line, std::string("malformed JSON: ") + e.what());
        }
        if (!rec.is_object()) throw ParseError(line, "record must be a JSON object");
        auto kind = get_string(rec, "kind", line);
        auto& pending = dialog(get_string(rec, "dialog_id", line), line);
        if (kind == "dialog") {
            add_meta(pending, rec, line);
        } else if (kind == "turn") {
            add_turn(pending, rec, line);
        } else if (kind == "event_row") {
            add_row(pending, rec, line);
        } else {
            throw ParseError(line, "unknown record kind \"" + kind + "\"");
        }
    }

    std::vector<Dialog> finish() {
        std::vector<Dialog> out;
        out.reserve(order_.size());
        for (auto& p : order_) {
            auto& d = p.dialog;
            std::sort(d.turns.begin(), d.turns.end(),
                      [](const Turn& x, const Turn& y) { return x.index < y.index; });
            for (std::size_t ei = 0; ei < d.events.size(); ++ei) {
                auto& rows = d.events[ei].rows;
                std::sort(rows.begin(), rows.end(),
                          [](const EventRow& x, const EventRow& y) { return x.turn < y.turn; });
                for (const auto& r : rows) {
                    if (!p.turn_lines.count(r.turn))
                        throw ParseError(p.row_lines.at({ei, r.turn}),
                                         "event \"" + d.events[ei].event_id +
                                             "\" references nonexistent turn " +
                                             std::to_string(r.turn));
                }
            }
            out.push_back(std::move(d));
        }
        return out;
    }

private:
    PendingDialog& dialog(const std::string& id, std::size_t line) {
        auto it = index_.find(id);
        if (it != index_.end()) return order_[it->second];
        if (id.empty()) throw ParseError(line, "empty dialog_id");
        index_.emplace(id, order_.size());
        order_.emplace_back();
        order_.back().dialog.dialog_id = id;
        return order_.back();
    }

    static void add_meta(PendingDialog& p, const json& rec, std::size_t line) {
        Split split = Split::None;
        if (rec.contains("split")) {
            auto s = get_string(rec, "split", line);
            auto parsed = parse_split(s);
            if (!parsed) throw ParseError(line, "unknown split \"" + s + "\"");
            split = *parsed;
        }
        if (p.has_meta && p.dialog.split != split)
            throw ParseError(line, "conflicting dialog record for \"" + p.dialog.dialog_id + "\"");
        p.has_meta = true;
        p.dialog.split = split;
    }

    static void add_turn(PendingDialog& p, const json& rec, std::size_t line) {
        Turn t;
        t.index = get_index(rec, "index", line);
        auto spk = get_string(rec, "speaker", line);
        auto speaker = parse_speaker(spk);
        if (!speaker) throw ParseError(line, "unknown speaker \"" + spk + "\"");
        t.speaker = *speaker;
        t.text = get_string(rec, "text", line);
        if (t.text.empty()) throw ParseError(line, "turn text is empty");
        if (!p.turn_lines.emplace(t.index, line).second)
            throw ParseError(line, "duplicate turn index " + std::to_string(t.index) +
                                       " (first at line " +
                                       std::to_string(p.turn_lines[t.index]) + ")");
        p.dialog.turns.push_back(std::move(t));
    }

    static void add_row(PendingDialog& p, const json& rec, std::size_t line) {
        auto event_id = get_string(rec, "event_id", line);
        auto proposition = get_string(rec, "proposition", line);
        EventRow row;
        row.turn = get_index(rec, "turn", line);
        row.state.bel_a = get_belief(rec, "bel_a", line);
        row.state.bel_b = get_belief(rec, "bel_b", line);
        bool has_a = rec.contains("cg_a"), has_b = rec.contains("cg_b");
        if (has_a != has_b) throw ParseError(line, "cg_a and cg_b must be given together");
        row.has_cg = has_a;
        if (has_a) {
            row.state.cg_a = get_cg(rec, "cg_a", line);
            row.state.cg_b = get_cg(rec, "cg_b", line);
        }

        auto& events = p.dialog.events;
        auto it = std::find_if(events.begin(), events.end(),
                               [&](const EventTimeline& e) { return e.event_id == event_id; });
        if (it == events.end()) {
            if (event_id.empty()) throw ParseError(line, "empty event_id");
            events.push_back(EventTimeline{event_id, proposition, {}});
            it = std::prev(events.end());
        } else if (it->proposition != proposition) {
            throw ParseError(line, "event \"" + event_id + "\" changes proposition");
        }
        auto ei = static_cast<std::size_t>(it - events.begin());
        if (!p.row_lines.emplace(std::pair{ei, row.turn}, line).second)
            throw ParseError(line, "duplicate row for event \"" + event_id + "\" at turn " +
                                       std::to_string(row.turn));
        it->rows.push_back(row);
    }

    std::vector<PendingDialog> order_;
    std::unordered_map<std::string, std::size_t> index_;
};

std::vector<Dialog> finish_parse(CorpusBuilder& builder, const ParseOptions& opts) {
    auto dialogs = builder.finish();
    if (opts.strict) {
        for (const auto& d : dialogs) {
            auto violations = validate_dialog(d);
            if (!violations.empty()) throw ParseError(0, describe(violations.front()));
        }
    }
    return dialogs;
}

}  // namespace

std::vector<Dialog> parse_corpus(std::istream& in, ParseOptions opts) {
    CorpusBuilder builder;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        builder.add_line(text, line);
    }
    return finish_parse(builder, opts);
}

std::vector<Dialog> parse_corpus(std::string_view text, ParseOptions opts) {
    std::istringstream in{std::string(text)};
    return parse_corpus(in, opts);
}

std::vector<Dialog> load_corpus(const std::string& path, ParseOptions opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open corpus \"" + path + "\"");
    return parse_corpus(in, opts);
}

void write_corpus(std::ostream& out, std::span<const Dialog> corpus) {
    for (const auto& d : corpus) {
        ordered_json meta;
        meta["kind"] = "dialog";
        meta["dialog_id"] = d.dialog_id;
        meta["split"] = to_string(d.split);
        out << meta.dump() << '\n';
        for (const auto& t : d.turns) {
            ordered_json rec;
            rec["kind"] = "turn";
            rec["dialog_id"] = d.dialog_id;
            rec["index"] = t.index;
            rec["speaker"] = to_string(t.speaker);
            rec["text"] = t.text;
            out << rec.dump() << '\n';
        }
        for (const auto& e : d.events) {
            for (const auto& r : e.rows) {
                ordered_json rec;
                rec["kind"] = "event_row";
                rec["dialog_id"] = d.dialog_id;
                rec["event_id"] = e.event_id;
                rec["proposition"] = e.proposition;
                rec["turn"] = r.turn;
                rec["bel_a"] = to_string(r.state.bel_a);
                rec["bel_b"] = to_string(r.state.bel_b);
                if (r.has_cg) {
                    rec["cg_a"] = to_string(r.state.cg_a);
                    rec["cg_b"] = to_string(r.state.cg_b);
                }
                out << rec.dump() << '\n';
            }
        }
    }
}

std::string serialize_corpus(std::span<const Dialog> corpus) {
    std::ostringstream out;
    write_corpus(out, corpus);
    return out.str();
}

std::string describe(const Violation& v) {
    std::string s = "dialog \"" + v.dialog_id + "\"";
    if (!v.event_id.empty()) s += " event \"" + v.event_id + "\"";
    if (v.turn) s += " turn " + std::to_string(*v.turn);
    s += ": " + v.rule;
    if (!v.detail.empty()) s += " (" + v.detail + ")";
    return s;
}

std::optional<TurnIndex> introduction_turn(const EventTimeline& event) {
    for (const auto& r : event.rows) {
        if (r.state.bel_a != BeliefLabel::NoBelief || r.state.bel_b != BeliefLabel::NoBelief)
            return r.turn;
    }
    return std::nullopt;
}

std::vector<Violation> validate_dialog(const Dialog& d) {
    std::vector<Violation> out;
    auto add = [&](std::string event, std::optional<TurnIndex> turn, std::string rule,
                   std::string detail = {}) {
        out.push_back({d.dialog_id, std::move(event), turn, std::move(rule), std::move(detail)});
    };

    for (std::size_t i = 0; i < d.turns.size(); ++i) {
        const auto& t = d.turns[i];
        if (t.index < 0) add({}, t.index, "negative turn index");
        if (t.text.empty()) add({}, t.index, "empty turn text");
        if (i > 0 && t.index <= d.turns[i - 1].index)
            add({}, t.index, "non-monotonic turn_index",
                "follows turn " + std::to_string(d.turns[i - 1].index));
    }

    for (std::size_t ei = 0; ei < d.events.size(); ++ei) {
        const auto& e = d.events[ei];
        for (std::size_t ej = 0; ej < ei; ++ej) {
            if (d.events[ej].event_id == e.event_id) {
                add(e.event_id, std::nullopt, "duplicate event_id");
                break;
            }
        }
        if (e.rows.empty()) {
            add(e.event_id, std::nullopt, "event has no rows");
            continue;
        }
        for (std::size_t ri = 0; ri < e.rows.size(); ++ri) {
            const auto& r = e.rows[ri];
            if (ri > 0 && r.turn <= e.rows[ri - 1].turn)
                add(e.event_id, r.turn, "non-monotonic turn_index",
                    "follows row at turn " + std::to_string(e.rows[ri - 1].turn));
            if (!d.find_turn(r.turn)) add(e.event_id, r.turn, "row references unknown turn");
        }
        // CG may only be annotated once somebody holds a belief. Checked in
        // discourse order, so an out-of-order row is judged by its turn.
        auto intro = introduction_turn(e);
        for (const auto& r : e.rows) {
            bool before = !intro || r.turn < *intro;
            if (before && (r.state.cg_a != CGLabel::NotAnnotated ||
                           r.state.cg_b != CGLabel::NotAnnotated)) {
                add(e.event_id, r.turn, "CG before introduction",
                    std::string("cg_a=") + std::string(to_string(r.state.cg_a)) +
                        " cg_b=" + std::string(to_string(r.state.cg_b)));
            }
        }
    }
    return out;
}

std::vector<Turn> timeline_slice(const Dialog& d, TurnIndex anchor, std::size_t before,
                                 std::size_t after) {
    auto it = std::find_if(d.turns.begin(), d.turns.end(),
                           [&](const Turn& t) { return t.index == anchor; });
    if (it == d.turns.end())
        throw Error(ErrorKind::NotFound, "dialog \"" + d.dialog_id + "\" has no turn " +
                                             std::to_string(anchor));
    auto pos = static_cast<std::size_t>(it - d.turns.begin());
    std::size_t first = pos >= before ? pos - before : 0;
    std::size_t last = after >= d.turns.size() - 1 - pos ? d.turns.size() - 1 : pos + after;
    return {d.turns.begin() + static_cast<std::ptrdiff_t>(first),
            d.turns.begin() + static_cast<std::ptrdiff_t>(last) + 1};
}

}  // namespace ctom
