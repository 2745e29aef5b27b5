#include "commontom/modelclient.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>

#include "commontom/error.hpp"

namespace ctom {

using nlohmann::json;
using nlohmann::ordered_json;

std::string build_prompt(const Query& query, const Dialog& dialog, const PromptSpec& spec) {
    if (spec.chain_of_thought)
        throw Error(ErrorKind::InvalidArgument, "chain-of-thought prompting is not supported");
    auto turns = timeline_slice(dialog, query.anchor_turn, spec.context_before, spec.context_after);
    std::string out = spec.instruction;
    out += "\n\nConversation:\n";
    for (const auto& t : turns) {
        out += std::to_string(t.index);
        out += " | ";
        out += to_char(t.speaker);
        out += ": ";
        out += t.text;
        if (t.index == query.anchor_turn) out += kAnchorMarker;
        out += '\n';
    }
    out += "\nQuestion:\n";
    out += query.text;
    return out;
}

std::optional<bool> parse_answer(std::string_view raw) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : raw) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    if (words.empty()) return std::nullopt;
    if (words.front() == "yes") return true;
    if (words.front() == "no") return false;
    bool yes = std::find(words.begin(), words.end(), "yes") != words.end();
    bool no = std::find(words.begin(), words.end(), "no") != words.end();
    if (yes != no) return yes;
    return std::nullopt;
}

std::vector<Prediction> RunResult::completed() const {
    std::vector<Prediction> out;
    for (const auto& p : predictions)
        if (p) out.push_back(*p);
    return out;
}

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // {prefix}/chat/completions
};

Endpoint split_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorKind::InvalidArgument, "base URL needs a scheme: \"" + base_url + "\"");
    auto scheme = base_url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw Error(ErrorKind::InvalidArgument, "unsupported URL scheme \"" + scheme + "\"");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme == "https")
        throw Error(ErrorKind::InvalidArgument, "built without TLS support; https unavailable");
#endif
    auto slash = base_url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = base_url.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : base_url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    e.path = prefix + "/chat/completions";
    return e;
}

std::string request_body(const EndpointConfig& endpoint, const PromptSpec& spec,
                         const std::string& prompt) {
    ordered_json body;
    body["model"] = endpoint.model;
    body["messages"] = json::array({ordered_json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = spec.temperature;
    return body.dump();
}

std::optional<std::string> completion_text(const std::string& body) {
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
    auto choices = doc.find("choices");
    if (choices == doc.end() || !choices->is_array() || choices->empty()) return std::nullopt;
    const auto& first = (*choices)[0];
    if (!first.is_object()) return std::nullopt;
    auto msg = first.find("message");
    if (msg == first.end() || !msg->is_object()) return std::nullopt;
    auto content = msg->find("content");
    if (content == msg->end() || !content->is_string()) return std::nullopt;
    return content->get<std::string>();
}

bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

const Dialog& dialog_for(std::span<const Dialog> corpus, const Query& q) {
    for (const auto& d : corpus)
        if (d.dialog_id == q.dialog_id) return d;
    throw Error(ErrorKind::NotFound, q.query_id + ": dialog not in corpus");
}

}  // namespace

RunResult run_benchmark(std::span<const Query> queries, std::span<const Dialog> corpus,
                        const PromptSpec& spec, const EndpointConfig& endpoint) {
    if (endpoint.max_concurrency < 1)
        throw Error(ErrorKind::InvalidArgument, "max_concurrency must be at least 1");
    if (endpoint.max_attempts < 1)
        throw Error(ErrorKind::InvalidArgument, "max_attempts must be at least 1");
    std::string token;
    if (!endpoint.auth_env.empty()) {
        const char* v = std::getenv(endpoint.auth_env.c_str());
        if (!v || !*v)
            throw Error(ErrorKind::Auth,
                        "environment variable " + endpoint.auth_env + " is not set");
        token = v;
    }
    auto target = split_url(endpoint.base_url);

    std::vector<std::string> bodies;
    bodies.reserve(queries.size());
    for (const auto& q : queries)
        bodies.push_back(request_body(endpoint, spec, build_prompt(q, dialog_for(corpus, q), spec)));

    RunResult result;
    result.predictions.resize(queries.size());
    result.log.resize(queries.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex abort_mu;

    auto worker = [&] {
        httplib::Client client(target.origin);
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
        auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        httplib::Headers headers;
        if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

        for (;;) {
            if (abort.load()) return;
            auto i = next.fetch_add(1);
            if (i >= queries.size()) return;
            RunLogEntry entry;
            entry.query_id = queries[i].query_id;
            entry.request_body = bodies[i];
            bool transport_failure = false;
            bool done = false;
            auto start = std::chrono::steady_clock::now();
            for (std::size_t attempt = 1; attempt <= endpoint.max_attempts && !done; ++attempt) {
                if (attempt > 1 && !endpoint.backoff.empty()) {
                    auto k = std::min(attempt - 1, endpoint.backoff.size()) - 1;
                    std::this_thread::sleep_for(endpoint.backoff[k]);
                }
                entry.attempts = attempt;
                auto res = client.Post(target.path, headers, bodies[i], "application/json");
                if (!res) {
                    transport_failure = true;
                    entry.error = "transport: " + httplib::to_string(res.error());
                    continue;
                }
                transport_failure = false;
                entry.http_status = res->status;
                entry.response_body = res->body;
                if (res->status == 200) {
                    entry.raw = completion_text(res->body);
                    entry.error = entry.raw ? "" : "unrecognised response body";
                    done = true;
                } else {
                    entry.error = "http status " + std::to_string(res->status);
                    if (!retryable(res->status)) break;
                }
            }
            entry.latency_ms = std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - start)
                                   .count();

            if (!done && transport_failure) {
                entry.error = "endpoint unreachable after " + std::to_string(entry.attempts) +
                              " attempts (" + entry.error + ")";
                {
                    std::lock_guard lock(abort_mu);
                    if (!abort.exchange(true)) result.abort_reason = entry.error;
                }
                result.log[i] = std::move(entry);
                return;
            }
            Prediction p;
            p.query_id = queries[i].query_id;
            if (entry.raw) {
                p.raw = entry.raw;
                p.answer = parse_answer(*entry.raw);
            }
            result.predictions[i] = std::move(p);
            result.log[i] = std::move(entry);
        }
    };

    auto n_workers = std::min(endpoint.max_concurrency, queries.size());
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    pool.clear();  // join

    result.aborted = abort.load();
    return result;
}

void write_run_log(std::ostream& out, const RunResult& result, const EndpointConfig& endpoint) {
    auto target = split_url(endpoint.base_url);
    for (const auto& e : result.log) {
        if (!e) continue;
        ordered_json rec;
        rec["query_id"] = e->query_id;
        rec["attempts"] = e->attempts;
        rec["latency_ms"] = e->latency_ms;
        rec["http_status"] = e->http_status;
        rec["raw"] = e->raw ? json(*e->raw) : json(nullptr);
        rec["error"] = e->error;
        ordered_json req;
        req["url"] = target.origin + target.path;
        ordered_json headers = {{"Content-Type", "application/json"}};
        if (!endpoint.auth_env.empty()) headers["Authorization"] = "Bearer [REDACTED]";
        req["headers"] = headers;
        req["body"] = e->request_body;
        rec["request"] = req;
        rec["response_body"] = e->response_body;
        out << rec.dump() << '\n';
    }
}

}  // namespace ctom
