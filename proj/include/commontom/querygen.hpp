#pragma once

// Benchmark construction: points of interest -> majority-case sampling ->
// 18 templated questions per point -> gold resolution.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commontom/cogstate.hpp"
#include "commontom/corpus.hpp"
#include "commontom/query.hpp"

namespace ctom {

// [A], [B], [A,B], [B,A], [A,B,A], [B,A,B]
const std::array<std::vector<Speaker>, 6>& question_chains();

// "At the time indicated, is it the case that A believes that B believes
// that it is possibly true that <proposition>?"
std::string render_question(std::span<const Speaker> chain, Certainty certainty,
                            std::string_view proposition);

// Exactly 18 queries: every chain crossed with every certainty, gold
// resolved from point.state.
std::vector<Query> generate_for_point(const std::string& dialog_id, const EventTimeline& event,
                                      const PointOfInterest& point);

struct AnchoredPoint {
    std::string dialog_id;
    const EventTimeline* event = nullptr;
    PointOfInterest point;
};

// CT+/CT+/JA/JA
bool is_majority(const AnnotationState& state) noexcept;

// Keeps each majority point with probability `rate`; everything else is
// kept. Every (dialog, event) draws from its own generator derived from
// `seed`, so results do not depend on how events are batched.
std::vector<AnchoredPoint> sample_majority(std::span<const AnchoredPoint> points, double rate,
                                           std::uint64_t seed);

struct Provenance {
    std::string tool_version;
    std::string corpus_hash;
    std::uint64_t seed = 0;
    double rate = 1.0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct QuerySet {
    std::vector<Query> queries;
    Provenance provenance;
};

std::vector<AnchoredPoint> collect_points(std::span<const Dialog> corpus);

QuerySet build_benchmark(std::span<const Dialog> corpus, double rate, std::uint64_t seed);

// Re-resolves gold for every query from the corpus annotation at its anchor
// turn. Throws NotFound for a query whose dialog, event or anchor state is
// missing.
void fill_gold(std::vector<Query>& queries, std::span<const Dialog> corpus);

// Benchmark JSONL: one query per line. A query without gold omits the field.
void write_benchmark(std::ostream& out, std::span<const Query> queries);
std::string serialize_benchmark(std::span<const Query> queries);
std::vector<Query> parse_benchmark(std::istream& in);
std::vector<Query> load_benchmark(const std::string& path);

}  // namespace ctom
