#pragma once

// Scoring of yes/no predictions against gold: accuracy overall and per order,
// per-proposition consistency, cross-order Pearson correlations and the
// frequency-matched random baseline.
//
// A proposition is a (dialog_id, event_id) pair, aggregated over all of its
// anchor turns.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commontom/corpus.hpp"
#include "commontom/query.hpp"

namespace ctom {

struct Prediction {
    std::string query_id;
    // nullopt: the model's reply could not be read as yes or no.
    std::optional<bool> answer;
    std::optional<std::string> raw;

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct Counts {
    std::size_t total = 0;
    std::size_t answered = 0;
    // missing + unparseable
    std::size_t unanswered = 0;
    std::size_t unparseable = 0;
    std::size_t correct = 0;
};

struct MetricsReport {
    std::optional<double> total_accuracy;
    // index 0..2 -> order 1..3; nullopt when no query of that order exists
    std::array<std::optional<double>, 3> per_order_accuracy;
    std::array<std::size_t, 3> per_order_total{};
    std::optional<double> consistency;
    std::size_t propositions = 0;
    // (1,2), (1,3), (2,3); nullopt when undefined
    std::array<std::optional<double>, 3> correlations;
    std::array<std::size_t, 3> correlation_n{};
    Counts counts;
};

inline constexpr std::array<std::pair<int, int>, 3> kOrderPairs = {{{1, 2}, {1, 3}, {2, 3}}};

// Missing predictions count as wrong and as unanswered. Throws NotFound for a
// prediction naming an unknown query, InvalidArgument for duplicates or for
// queries without gold.
MetricsReport score(std::span<const Query> queries, std::span<const Prediction> preds);

// Pearson product-moment correlation; nullopt when either input has zero
// variance. Throws InvalidArgument on length mismatch or fewer than 2 points.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

struct BaselineReport {
    double p_yes = 0.5;
    std::size_t n = 0;
    std::size_t gold_yes = 0;
    std::size_t gold_no = 0;
    // p_yes * q_yes + p_no * q_no over the scored gold distribution
    double expected = 0.0;
    std::array<std::optional<double>, 3> expected_per_order;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    double mc_mean = 0.0;
    double mc_stddev = 0.0;
};

// p_yes + p_no must equal 1 (to 1e-9).
BaselineReport random_baseline(std::span<const Query> queries, double p_yes, double p_no,
                               std::uint64_t seed, std::size_t trials);

struct YesNo {
    std::size_t yes = 0;
    std::size_t no = 0;
    friend bool operator==(const YesNo&, const YesNo&) = default;
};

// Gold yes/no counts per split of the owning dialog. Dialogs missing from
// `splits` count as Split::None; queries without gold are skipped.
std::map<Split, YesNo> split_counts(std::span<const Query> queries,
                                    const std::map<std::string, Split>& splits);
std::map<std::string, Split> dialog_splits(std::span<const Dialog> corpus);

// Predictions JSONL: {"query_id":..,"answer":"yes"|"no"|null,"raw":..}
void write_predictions(std::ostream& out, std::span<const Prediction> preds);
std::vector<Prediction> parse_predictions(std::istream& in);
std::vector<Prediction> load_predictions(const std::string& path);

}  // namespace ctom
