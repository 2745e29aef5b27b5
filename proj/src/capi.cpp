#include "commontom/commontom.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <new>
#include <sstream>

#include <json.hpp>

#include "commontom/answers.hpp"
#include "commontom/cogstate.hpp"
#include "commontom/corpus.hpp"
#include "commontom/error.hpp"
#include "commontom/eval.hpp"
#include "commontom/hashing.hpp"
#include "commontom/modelclient.hpp"
#include "commontom/querygen.hpp"
#include "commontom/reports.hpp"
#include "commontom/version.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

struct ctom_corpus {
    std::vector<ctom::Dialog> dialogs;
    std::string hash;
};

struct ctom_benchmark {
    std::vector<ctom::Query> queries;
    // Present for generated benchmarks and for files with a metadata sidecar.
    std::optional<ctom::Provenance> provenance;
    std::map<std::string, ctom::Split> splits;
    std::string source_hash;
};

namespace {

thread_local std::string g_last_error;

ctom_status status_for(ctom::ErrorKind kind) {
    switch (kind) {
    case ctom::ErrorKind::InvalidArgument: return CTOM_ERR_INVALID_ARGUMENT;
    case ctom::ErrorKind::Parse: return CTOM_ERR_PARSE;
    case ctom::ErrorKind::Validation: return CTOM_ERR_VALIDATION;
    case ctom::ErrorKind::NotFound: return CTOM_ERR_NOT_FOUND;
    case ctom::ErrorKind::Io: return CTOM_ERR_IO;
    case ctom::ErrorKind::Network: return CTOM_ERR_NETWORK;
    case ctom::ErrorKind::Auth: return CTOM_ERR_AUTH;
    }
    return CTOM_ERR_INTERNAL;
}

template <class F>
ctom_status guarded(F&& f) {
    g_last_error.clear();
    try {
        return f();
    } catch (const ctom::Error& e) {
        g_last_error = e.what();
        return status_for(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CTOM_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CTOM_ERR_INTERNAL;
    }
}

ctom_status fail(ctom_status s, std::string msg) {
    g_last_error = std::move(msg);
    return s;
}

char* dup_string(const std::string& s) {
    auto* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ctom::Error(ctom::ErrorKind::Io, "cannot open \"" + path + "\"");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ctom::Error(ctom::ErrorKind::Io, "cannot write \"" + path + "\"");
    out << data;
    out.flush();
    if (!out) throw ctom::Error(ctom::ErrorKind::Io, "write failed for \"" + path + "\"");
}

std::string meta_path(const std::string& path) { return path + ".meta.json"; }

ordered_json tool_stamp() {
    return {{"tool", ctom::kToolName}, {"version", ctom::kToolVersion}};
}

ordered_json benchmark_provenance(const ctom_benchmark& b) {
    ordered_json j = b.provenance ? ctom::to_json(*b.provenance) : tool_stamp();
    if (!b.source_hash.empty()) j["benchmark_hash"] = b.source_hash;
    return j;
}

ctom::Provenance provenance_from_json(const json& j) {
    ctom::Provenance p;
    p.tool_version = j.value("version", "");
    p.corpus_hash = j.value("corpus_hash", "");
    p.seed = j.value("seed", std::uint64_t{0});
    p.rate = j.value("rate", 1.0);
    return p;
}

bool check_out(const void* p, const char* name) {
    if (p) return true;
    g_last_error = std::string(name) + " must not be NULL";
    return false;
}

std::vector<ctom::Speaker> parse_chain(const char* chain) {
    std::vector<ctom::Speaker> out;
    for (const char* c = chain; *c; ++c) {
        auto s = ctom::parse_speaker(std::string_view(c, 1));
        if (!s) throw ctom::Error(ctom::ErrorKind::InvalidArgument,
                                  std::string("chain may only contain A and B: \"") + chain + "\"");
        out.push_back(*s);
    }
    return out;
}

}  // namespace

extern "C" {

const char* ctom_version(void) { return ctom::kToolVersion; }

const char* ctom_status_string(ctom_status status) {
    switch (status) {
    case CTOM_OK: return "ok";
    case CTOM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CTOM_ERR_PARSE: return "parse error";
    case CTOM_ERR_VALIDATION: return "validation error";
    case CTOM_ERR_NOT_FOUND: return "not found";
    case CTOM_ERR_IO: return "i/o error";
    case CTOM_ERR_NETWORK: return "network error";
    case CTOM_ERR_AUTH: return "authentication error";
    case CTOM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* ctom_last_error(void) { return g_last_error.c_str(); }

void ctom_string_free(char* s) { std::free(s); }

ctom_status ctom_corpus_load_buffer(const char* data, size_t len, int strict, ctom_corpus** out) {
    if (!check_out(out, "out") || (!data && len)) return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        std::string_view text(data ? data : "", len);
        auto c = std::make_unique<ctom_corpus>();
        c->dialogs = ctom::parse_corpus(text, ctom::ParseOptions{strict != 0});
        c->hash = ctom::content_hash(ctom::serialize_corpus(c->dialogs));
        *out = c.release();
        return CTOM_OK;
    });
}

ctom_status ctom_corpus_load_file(const char* path, int strict, ctom_corpus** out) {
    if (!check_out(path, "path") || !check_out(out, "out")) return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto text = read_file(path);
        return ctom_corpus_load_buffer(text.data(), text.size(), strict, out);
    });
}

void ctom_corpus_free(ctom_corpus* corpus) { delete corpus; }

size_t ctom_corpus_dialog_count(const ctom_corpus* corpus) {
    return corpus ? corpus->dialogs.size() : 0;
}

ctom_status ctom_corpus_hash(const ctom_corpus* corpus, char** hash) {
    if (!check_out(corpus, "corpus") || !check_out(hash, "hash")) return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *hash = dup_string(corpus->hash);
        return CTOM_OK;
    });
}

ctom_status ctom_corpus_validate(const ctom_corpus* corpus, char** report_json,
                                 size_t* violation_count) {
    if (!check_out(corpus, "corpus")) return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto report = ctom::validation_report(corpus->dialogs);
        auto prov = tool_stamp();
        prov["corpus_hash"] = corpus->hash;
        report["provenance"] = prov;
        if (violation_count) *violation_count = report["violations"].size();
        if (report_json) *report_json = dup_string(report.dump(2));
        return CTOM_OK;
    });
}

ctom_status ctom_corpus_infer_cg(const ctom_corpus* corpus, const char* out_path,
                                 char** report_json) {
    if (!check_out(corpus, "corpus") || !check_out(out_path, "out_path"))
        return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto inference = ctom::infer_corpus(corpus->dialogs);
        auto text = ctom::serialize_corpus(inference.corpus);
        write_file(out_path, text);
        auto report = ctom::divergence_report(inference);
        auto prov = tool_stamp();
        prov["corpus_hash"] = corpus->hash;
        prov["output_hash"] = ctom::content_hash(text);
        report["provenance"] = prov;
        write_file(meta_path(out_path), ordered_json{{"provenance", prov}}.dump(2) + "\n");
        if (report_json) *report_json = dup_string(report.dump(2));
        return CTOM_OK;
    });
}

ctom_status ctom_benchmark_build(const ctom_corpus* corpus, double rate, uint64_t seed,
                                 ctom_benchmark** out) {
    if (!check_out(corpus, "corpus") || !check_out(out, "out")) return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto set = ctom::build_benchmark(corpus->dialogs, rate, seed);
        auto b = std::make_unique<ctom_benchmark>();
        b->queries = std::move(set.queries);
        b->provenance = set.provenance;
        b->splits = ctom::dialog_splits(corpus->dialogs);
        *out = b.release();
        return CTOM_OK;
    });
}

ctom_status ctom_benchmark_load_file(const char* path, ctom_benchmark** out) {
    if (!check_out(path, "path") || !check_out(out, "out")) return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto text = read_file(path);
        std::istringstream in(text);
        auto b = std::make_unique<ctom_benchmark>();
        b->queries = ctom::parse_benchmark(in);
        b->source_hash = ctom::content_hash(text);
        std::ifstream meta(meta_path(path), std::ios::binary);
        if (meta) {
            auto doc = json::parse(meta, nullptr, false);
            if (doc.is_object()) {
                if (doc.contains("provenance") && doc["provenance"].is_object())
                    b->provenance = provenance_from_json(doc["provenance"]);
                if (doc.contains("splits") && doc["splits"].is_object()) {
                    for (const auto& [id, s] : doc["splits"].items()) {
                        auto split = s.is_string() ? ctom::parse_split(s.get<std::string>())
                                                   : std::nullopt;
                        if (split) b->splits[id] = *split;
                    }
                }
            }
        }
        *out = b.release();
        return CTOM_OK;
    });
}

void ctom_benchmark_free(ctom_benchmark* benchmark) { delete benchmark; }

size_t ctom_benchmark_size(const ctom_benchmark* benchmark) {
    return benchmark ? benchmark->queries.size() : 0;
}

ctom_status ctom_benchmark_write_file(const ctom_benchmark* benchmark, const char* path) {
    if (!check_out(benchmark, "benchmark") || !check_out(path, "path"))
        return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto text = ctom::serialize_benchmark(benchmark->queries);
        write_file(path, text);
        ordered_json meta;
        auto prov = benchmark->provenance ? ctom::to_json(*benchmark->provenance) : tool_stamp();
        prov["benchmark_hash"] = ctom::content_hash(text);
        meta["provenance"] = prov;
        ordered_json splits = ordered_json::object();
        for (const auto& [id, s] : benchmark->splits) splits[id] = ctom::to_string(s);
        meta["splits"] = splits;
        write_file(meta_path(path), meta.dump(2) + "\n");
        return CTOM_OK;
    });
}

ctom_status ctom_benchmark_provenance(const ctom_benchmark* benchmark, char** out) {
    if (!check_out(benchmark, "benchmark") || !check_out(out, "json"))
        return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = dup_string(benchmark_provenance(*benchmark).dump(2));
        return CTOM_OK;
    });
}

ctom_status ctom_benchmark_fill_gold(ctom_benchmark* benchmark, const ctom_corpus* corpus) {
    if (!check_out(benchmark, "benchmark") || !check_out(corpus, "corpus"))
        return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        ctom::fill_gold(benchmark->queries, corpus->dialogs);
        auto prov = benchmark->provenance.value_or(ctom::Provenance{ctom::kToolVersion, {}, 0, 1.0});
        prov.corpus_hash = corpus->hash;
        prov.tool_version = ctom::kToolVersion;
        benchmark->provenance = prov;
        for (const auto& [id, s] : ctom::dialog_splits(corpus->dialogs)) benchmark->splits[id] = s;
        return CTOM_OK;
    });
}

ctom_status ctom_benchmark_split_counts(const ctom_benchmark* benchmark, const ctom_corpus* corpus,
                                        char** out) {
    if (!check_out(benchmark, "benchmark") || !check_out(out, "json"))
        return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto splits = corpus ? ctom::dialog_splits(corpus->dialogs) : benchmark->splits;
        auto counts = ctom::split_counts(benchmark->queries, splits);
        *out = dup_string(ctom::to_json(counts).dump(2));
        return CTOM_OK;
    });
}

ctom_status ctom_evaluate_file(const ctom_benchmark* benchmark, const char* predictions_path,
                               char** report_json) {
    if (!check_out(benchmark, "benchmark") || !check_out(predictions_path, "predictions_path") ||
        !check_out(report_json, "report_json"))
        return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto text = read_file(predictions_path);
        std::istringstream in(text);
        auto preds = ctom::parse_predictions(in);
        auto report = ctom::to_json(ctom::score(benchmark->queries, preds));
        auto prov = benchmark_provenance(*benchmark);
        prov["predictions_hash"] = ctom::content_hash(text);
        report["provenance"] = prov;
        *report_json = dup_string(report.dump(2));
        return CTOM_OK;
    });
}

ctom_status ctom_random_baseline(const ctom_benchmark* benchmark, double train_yes,
                                 double train_no, uint64_t seed, uint32_t trials,
                                 char** report_json) {
    if (!check_out(benchmark, "benchmark") || !check_out(report_json, "report_json"))
        return CTOM_ERR_INVALID_ARGUMENT;
    if (!(train_yes >= 0 && train_no >= 0 && train_yes + train_no > 0))
        return fail(CTOM_ERR_INVALID_ARGUMENT, "training answer counts must be non-negative");
    return guarded([&] {
        double total = train_yes + train_no;
        auto rep = ctom::random_baseline(benchmark->queries, train_yes / total, train_no / total,
                                         seed, trials);
        auto j = ctom::to_json(rep);
        j["train_counts"] = {{"yes", train_yes}, {"no", train_no}};
        j["provenance"] = benchmark_provenance(*benchmark);
        *report_json = dup_string(j.dump(2));
        return CTOM_OK;
    });
}

void ctom_run_options_init(ctom_run_options* o) {
    if (!o) return;
    static const uint32_t kBackoff[] = {500, 2000, 8000};
    *o = ctom_run_options{};
    o->max_concurrency = 4;
    o->max_attempts = 3;
    o->backoff_ms = kBackoff;
    o->backoff_len = 3;
    o->timeout_ms = 60000;
    o->context_before = 5;
    o->context_after = 5;
    o->temperature = 1.0;
}

ctom_status ctom_run_model(const ctom_benchmark* benchmark, const ctom_corpus* corpus,
                           const ctom_run_options* options, const char* predictions_path,
                           const char* log_path, char** summary_json) {
    if (!check_out(benchmark, "benchmark") || !check_out(corpus, "corpus") ||
        !check_out(options, "options") || !check_out(predictions_path, "predictions_path") ||
        !check_out(options->base_url, "options->base_url") ||
        !check_out(options->model, "options->model"))
        return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        ctom::EndpointConfig endpoint;
        endpoint.base_url = options->base_url;
        endpoint.model = options->model;
        endpoint.auth_env = options->auth_env ? options->auth_env : "";
        endpoint.max_concurrency = options->max_concurrency;
        endpoint.max_attempts = options->max_attempts;
        endpoint.backoff.clear();
        for (size_t i = 0; options->backoff_ms && i < options->backoff_len; ++i)
            endpoint.backoff.emplace_back(options->backoff_ms[i]);
        endpoint.timeout = std::chrono::milliseconds(options->timeout_ms);
        ctom::PromptSpec spec;
        spec.context_before = options->context_before;
        spec.context_after = options->context_after;
        spec.temperature = options->temperature;

        auto result = ctom::run_benchmark(benchmark->queries, corpus->dialogs, spec, endpoint);

        std::ostringstream preds;
        auto completed = result.completed();
        ctom::write_predictions(preds, completed);
        write_file(predictions_path, preds.str());
        if (log_path) {
            std::ostringstream log;
            ctom::write_run_log(log, result, endpoint);
            write_file(log_path, log.str());
        }

        std::size_t unparseable = 0;
        for (const auto& p : completed) unparseable += !p.answer;
        ordered_json summary;
        summary["queries"] = benchmark->queries.size();
        summary["completed"] = completed.size();
        summary["unparseable"] = unparseable;
        summary["aborted"] = result.aborted;
        if (result.aborted) summary["abort_reason"] = result.abort_reason;
        auto prov = benchmark_provenance(*benchmark);
        prov["corpus_hash"] = corpus->hash;
        prov["model"] = endpoint.model;
        prov["base_url"] = endpoint.base_url;
        prov["temperature"] = spec.temperature;
        prov["context"] = {spec.context_before, spec.context_after};
        summary["provenance"] = prov;
        write_file(meta_path(predictions_path), ordered_json{{"provenance", prov}}.dump(2) + "\n");
        if (summary_json) *summary_json = dup_string(summary.dump(2));
        if (result.aborted) {
            g_last_error = result.abort_reason;
            return CTOM_ERR_NETWORK;
        }
        return CTOM_OK;
    });
}

ctom_status ctom_infer_cg(const char* bel_a, const char* bel_b, char* cg, size_t cg_len,
                          int* underdetermined) {
    if (!check_out(bel_a, "bel_a") || !check_out(bel_b, "bel_b") || !check_out(cg, "cg"))
        return CTOM_ERR_INVALID_ARGUMENT;
    if (cg_len < 3) return fail(CTOM_ERR_INVALID_ARGUMENT, "cg buffer must hold 3 bytes");
    auto a = ctom::parse_belief(bel_a);
    auto b = ctom::parse_belief(bel_b);
    if (!a || !b) return fail(CTOM_ERR_PARSE, "unknown belief label");
    auto inf = ctom::infer_cg(*a, *b);
    std::string s = inf.cg ? std::string(ctom::to_string(*inf.cg)) : std::string();
    std::memcpy(cg, s.c_str(), s.size() + 1);
    if (underdetermined) *underdetermined = inf.ja_in_underdetermined ? 1 : 0;
    g_last_error = inf.diagnostic;
    return CTOM_OK;
}

ctom_status ctom_resolve_answer(const char* certainty, const char* chain, const char* bel_a,
                                const char* bel_b, const char* cg_a, const char* cg_b, int* yes) {
    if (!check_out(certainty, "certainty") || !check_out(chain, "chain") ||
        !check_out(bel_a, "bel_a") || !check_out(bel_b, "bel_b") || !check_out(cg_a, "cg_a") ||
        !check_out(cg_b, "cg_b") || !check_out(yes, "yes"))
        return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto c = ctom::parse_certainty(certainty);
        auto ba = ctom::parse_belief(bel_a), bb = ctom::parse_belief(bel_b);
        auto ca = ctom::parse_cg(cg_a), cb = ctom::parse_cg(cg_b);
        if (!c || !ba || !bb || !ca || !cb) return fail(CTOM_ERR_PARSE, "unknown label");
        ctom::AnnotationState state{*ba, *bb, *ca, *cb};
        *yes = ctom::resolve(*c, parse_chain(chain), state) ? 1 : 0;
        return CTOM_OK;
    });
}

ctom_status ctom_render_question(const char* chain, const char* certainty,
                                 const char* proposition, char** out) {
    if (!check_out(chain, "chain") || !check_out(certainty, "certainty") ||
        !check_out(proposition, "proposition") || !check_out(out, "out"))
        return CTOM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto c = ctom::parse_certainty(certainty);
        if (!c) return fail(CTOM_ERR_PARSE, std::string("unknown certainty \"") + certainty + "\"");
        *out = dup_string(ctom::render_question(parse_chain(chain), *c, proposition));
        return CTOM_OK;
    });
}

int ctom_parse_answer(const char* raw) {
    if (!raw) return -1;
    auto a = ctom::parse_answer(raw);
    return a ? (*a ? 1 : 0) : -1;
}

}  // extern "C"
