#pragma once

// Annotated-dialog data model and the corpus JSONL interchange format.
//
// A corpus file holds three record kinds, one per line, discriminated by
// "kind":
//
//   {"kind":"dialog","dialog_id":..,"split":"train"|"test"|"none"}
//   {"kind":"turn","dialog_id":..,"index":..,"speaker":"A"|"B","text":..}
//   {"kind":"event_row","dialog_id":..,"event_id":..,"proposition":..,
//    "turn":..,"bel_a":..,"bel_b":..,"cg_a":..,"cg_b":..}
//
// Records of different dialogs may interleave. Event rows are sparse: a turn
// without a row for an event inherits the most recent earlier row.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commontom/labels.hpp"

namespace ctom {

using TurnIndex = std::int64_t;

enum class Split { Train, Test, None };

std::string_view to_string(Split s) noexcept;
std::optional<Split> parse_split(std::string_view s) noexcept;

struct Turn {
    TurnIndex index = 0;
    Speaker speaker = Speaker::A;
    std::string text;

    friend bool operator==(const Turn&, const Turn&) = default;
};

struct EventRow {
    TurnIndex turn = 0;
    AnnotationState state;
    // False when the row came without cg_a/cg_b (e.g. predicted beliefs);
    // the state then carries NA for both.
    bool has_cg = true;

    friend bool operator==(const EventRow&, const EventRow&) = default;
};

struct EventTimeline {
    std::string event_id;
    std::string proposition;
    std::vector<EventRow> rows;

    // State in force at `turn`: the row at that turn or the latest earlier
    // one. nullopt before the first row.
    std::optional<AnnotationState> state_at(TurnIndex turn) const;

    const EventRow* row_at(TurnIndex turn) const;

    friend bool operator==(const EventTimeline&, const EventTimeline&) = default;
};

struct Dialog {
    std::string dialog_id;
    std::vector<Turn> turns;
    std::vector<EventTimeline> events;
    Split split = Split::None;

    const Turn* find_turn(TurnIndex index) const;
    const EventTimeline* find_event(std::string_view event_id) const;

    friend bool operator==(const Dialog&, const Dialog&) = default;
};

struct ParseOptions {
    // Run validate_dialog on every parsed dialog and fail on the first
    // violation. Structural errors always fail.
    bool strict = true;
};

// Throws ParseError naming the offending line.
std::vector<Dialog> parse_corpus(std::istream& in, ParseOptions opts = {});
std::vector<Dialog> parse_corpus(std::string_view text, ParseOptions opts = {});
std::vector<Dialog> load_corpus(const std::string& path, ParseOptions opts = {});

// Canonical serialization: per dialog, the dialog record, its turns, then
// event rows grouped by event. parse(serialize(x)) == x.
void write_corpus(std::ostream& out, std::span<const Dialog> corpus);
std::string serialize_corpus(std::span<const Dialog> corpus);

struct Violation {
    std::string dialog_id;
    std::string event_id;  // empty for dialog-level rules
    std::optional<TurnIndex> turn;
    std::string rule;
    std::string detail;
};

std::string describe(const Violation& v);

// Empty iff every data-model invariant holds.
std::vector<Violation> validate_dialog(const Dialog& d);

// The first row whose beliefs are not both NB. CG labels before it must be NA.
std::optional<TurnIndex> introduction_turn(const EventTimeline& event);

// Up to `before` turns preceding and `after` following the anchor, plus the
// anchor itself, clipped to the dialog, in discourse order.
std::vector<Turn> timeline_slice(const Dialog& d, TurnIndex anchor,
                                 std::size_t before, std::size_t after);

}  // namespace ctom
