#pragma once

// Zero-shot prompting of a chat-completions endpoint and yes/no extraction.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commontom/corpus.hpp"
#include "commontom/eval.hpp"
#include "commontom/query.hpp"

namespace ctom {

inline constexpr std::string_view kZeroShotInstruction =
    "You are a cautious assistant. You carefully follow instructions. You are helpful and "
    "harmless and you follow ethical guidelines and promote positive behavior. Given a "
    "conversation, answer a yes or no question without providing any additional information.";

inline constexpr std::string_view kAnchorMarker = " [<- at this time]";

struct PromptSpec {
    std::string instruction{kZeroShotInstruction};
    std::size_t context_before = 5;
    std::size_t context_after = 5;
    double temperature = 1.0;
    // Step-by-step prompting is not supported; build_prompt rejects it.
    bool chain_of_thought = false;
};

// instruction, blank line, "Conversation:", one "{index} | {speaker}: {text}"
// line per context turn (anchor marked), blank line, "Question:", question.
std::string build_prompt(const Query& query, const Dialog& dialog, const PromptSpec& spec);

// Case-insensitive. A leading "yes"/"no" word decides; otherwise exactly one
// of the two words must occur somewhere. nullopt when unreadable.
std::optional<bool> parse_answer(std::string_view raw);

struct EndpointConfig {
    // e.g. "https://api.openai.com/v1"; requests go to {base_url}/chat/completions
    std::string base_url;
    std::string model;
    // Name of the environment variable holding the bearer token; empty for none.
    std::string auth_env;
    std::size_t max_concurrency = 4;
    std::size_t max_attempts = 3;
    // Wait before retry k (1-based) is backoff[min(k, size) - 1].
    std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(500),
                                                   std::chrono::milliseconds(2000),
                                                   std::chrono::milliseconds(8000)};
    std::chrono::milliseconds timeout{60000};
};

struct RunLogEntry {
    std::string query_id;
    std::size_t attempts = 0;
    double latency_ms = 0.0;
    int http_status = 0;  // last status seen, 0 if none
    std::optional<std::string> raw;
    std::string request_body;
    std::string response_body;
    std::string error;
};

struct RunResult {
    // Input order. nullopt only for queries never attempted after an abort.
    std::vector<std::optional<Prediction>> predictions;
    std::vector<std::optional<RunLogEntry>> log;
    bool aborted = false;
    std::string abort_reason;

    std::vector<Prediction> completed() const;
};

// One request per query with at most max_concurrency in flight. Throttling
// and server errors are retried; a query whose attempts are exhausted is
// recorded as unparseable. An unreachable endpoint stops dispatching and
// returns the partial result with aborted set. Throws Auth when auth_env is
// named but unset, NotFound for an anchor turn missing from the corpus.
RunResult run_benchmark(std::span<const Query> queries, std::span<const Dialog> corpus,
                        const PromptSpec& spec, const EndpointConfig& endpoint);

// JSONL, one object per attempted query; the Authorization header is redacted.
void write_run_log(std::ostream& out, const RunResult& result, const EndpointConfig& endpoint);

}  // namespace ctom
