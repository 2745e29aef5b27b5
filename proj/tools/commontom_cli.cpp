// commontom: command-line front end over the C API.
//
// Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commontom/commontom.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CorpusDeleter {
    void operator()(ctom_corpus* c) const { ctom_corpus_free(c); }
};
struct BenchmarkDeleter {
    void operator()(ctom_benchmark* b) const { ctom_benchmark_free(b); }
};
struct StringDeleter {
    void operator()(char* s) const { ctom_string_free(s); }
};
using CorpusPtr = std::unique_ptr<ctom_corpus, CorpusDeleter>;
using BenchmarkPtr = std::unique_ptr<ctom_benchmark, BenchmarkDeleter>;
using CString = std::unique_ptr<char, StringDeleter>;

class CommandError : public std::runtime_error {
public:
    CommandError(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

void check(ctom_status s, const std::string& what) {
    if (s == CTOM_OK) return;
    int code = s == CTOM_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
    throw CommandError(code, what + ": " + ctom_status_string(s) + ": " + ctom_last_error());
}

CorpusPtr load_corpus(const std::string& path, bool strict = true) {
    ctom_corpus* c = nullptr;
    check(ctom_corpus_load_file(path.c_str(), strict ? 1 : 0, &c), "loading corpus " + path);
    return CorpusPtr(c);
}

BenchmarkPtr load_benchmark(const std::string& path) {
    ctom_benchmark* b = nullptr;
    check(ctom_benchmark_load_file(path.c_str(), &b), "loading benchmark " + path);
    return BenchmarkPtr(b);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CommandError(kExitFailure, "cannot write " + path);
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

nlohmann::json parse_json(const CString& s) { return nlohmann::json::parse(s.get()); }

std::string percent(const nlohmann::json& v) {
    if (v.is_null()) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v.get<double>() * 100.0);
    return buf;
}

std::string fixed(const nlohmann::json& v, int digits = 3) {
    if (v.is_null()) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v.get<double>());
    return buf;
}

// ---- subcommands ----------------------------------------------------------

struct ValidateArgs {
    std::string corpus;
    std::string report;
};

int run_validate(const ValidateArgs& a) {
    ctom_corpus* raw = nullptr;
    auto s = ctom_corpus_load_file(a.corpus.c_str(), 0, &raw);
    if (s == CTOM_ERR_PARSE) {
        std::cout << "1 violations\n  parse: " << ctom_last_error() << '\n';
        return kExitFailure;
    }
    check(s, "loading corpus " + a.corpus);
    CorpusPtr corpus(raw);
    char* report = nullptr;
    std::size_t n = 0;
    check(ctom_corpus_validate(corpus.get(), &report, &n), "validating");
    CString owned(report);
    if (!a.report.empty()) write_text(a.report, report);
    std::cout << n << " violations\n";
    auto parsed = parse_json(owned);
    for (const auto& v : parsed["violations"]) {
        std::cout << "  " << v["dialog_id"].get<std::string>();
        if (!v["event_id"].is_null()) std::cout << " / " << v["event_id"].get<std::string>();
        if (!v["turn"].is_null()) std::cout << " @" << v["turn"].get<std::int64_t>();
        std::cout << ": " << v["rule"].get<std::string>();
        if (!v["detail"].get<std::string>().empty())
            std::cout << " (" << v["detail"].get<std::string>() << ")";
        std::cout << '\n';
    }
    return n == 0 ? kExitOk : kExitFailure;
}

struct InferArgs {
    std::string corpus;
    std::string out;
    std::string report;
};

int run_infer_cg(const InferArgs& a) {
    auto corpus = load_corpus(a.corpus, false);
    char* report = nullptr;
    check(ctom_corpus_infer_cg(corpus.get(), a.out.c_str(), &report), "inferring common ground");
    CString owned(report);
    if (!a.report.empty()) write_text(a.report, report);
    std::cout << report << '\n';
    return kExitOk;
}

struct GenerateArgs {
    std::string corpus;
    double rate = 0.1;
    std::uint64_t seed = 0;
    std::string out;
};

int run_generate(const GenerateArgs& a) {
    auto corpus = load_corpus(a.corpus);
    ctom_benchmark* raw = nullptr;
    check(ctom_benchmark_build(corpus.get(), a.rate, a.seed, &raw), "building benchmark");
    BenchmarkPtr bench(raw);
    check(ctom_benchmark_write_file(bench.get(), a.out.c_str()), "writing " + a.out);
    std::cout << "wrote " << ctom_benchmark_size(bench.get()) << " queries from "
              << ctom_corpus_dialog_count(corpus.get()) << " dialogs to " << a.out
              << " (rate " << a.rate << ", seed " << a.seed << ")\n";
    return kExitOk;
}

struct AnswerArgs {
    std::string benchmark;
    std::string corpus;
    std::string out;
};

int run_answer(const AnswerArgs& a) {
    auto corpus = load_corpus(a.corpus);
    auto bench = load_benchmark(a.benchmark);
    check(ctom_benchmark_fill_gold(bench.get(), corpus.get()), "resolving gold answers");
    check(ctom_benchmark_write_file(bench.get(), a.out.c_str()), "writing " + a.out);
    std::cout << "resolved " << ctom_benchmark_size(bench.get()) << " gold answers into " << a.out
              << '\n';
    return kExitOk;
}

struct RunModelArgs {
    std::string benchmark;
    std::string corpus;
    std::string base_url;
    std::string model;
    std::string auth_env;
    std::uint32_t concurrency = 4;
    std::uint32_t max_attempts = 3;
    std::vector<std::uint32_t> backoff_ms{500, 2000, 8000};
    std::uint32_t timeout_ms = 60000;
    std::uint32_t context_before = 5;
    std::uint32_t context_after = 5;
    double temperature = 1.0;
    std::string out;
    std::string log;
};

int run_model(const RunModelArgs& a) {
    auto corpus = load_corpus(a.corpus);
    auto bench = load_benchmark(a.benchmark);
    ctom_run_options opts;
    ctom_run_options_init(&opts);
    opts.base_url = a.base_url.c_str();
    opts.model = a.model.c_str();
    opts.auth_env = a.auth_env.empty() ? nullptr : a.auth_env.c_str();
    opts.max_concurrency = a.concurrency;
    opts.max_attempts = a.max_attempts;
    opts.backoff_ms = a.backoff_ms.data();
    opts.backoff_len = a.backoff_ms.size();
    opts.timeout_ms = a.timeout_ms;
    opts.context_before = a.context_before;
    opts.context_after = a.context_after;
    opts.temperature = a.temperature;

    char* summary = nullptr;
    auto s = ctom_run_model(bench.get(), corpus.get(), &opts, a.out.c_str(),
                            a.log.empty() ? nullptr : a.log.c_str(), &summary);
    CString owned(summary);
    if (summary) {
        auto j = parse_json(owned);
        std::cout << j["completed"] << "/" << j["queries"] << " queries answered, "
                  << j["unparseable"] << " unparseable\n";
    }
    if (s == CTOM_ERR_NETWORK) {
        std::cerr << "run aborted, partial results written: " << ctom_last_error() << '\n';
        return kExitFailure;
    }
    check(s, "running model");
    return kExitOk;
}

struct BaselineArgs {
    std::string benchmark;
    std::vector<double> train_freqs;
    std::uint64_t seed = 0;
    std::uint32_t trials = 10000;
    std::string report;
};

int run_baseline(const BaselineArgs& a) {
    auto bench = load_benchmark(a.benchmark);
    char* report = nullptr;
    check(ctom_random_baseline(bench.get(), a.train_freqs.at(0), a.train_freqs.at(1), a.seed,
                               a.trials, &report),
          "computing baseline");
    CString owned(report);
    if (!a.report.empty()) write_text(a.report, report);
    auto j = parse_json(owned);
    std::cout << "random baseline over " << j["n"] << " queries\n"
              << "  expected accuracy  " << percent(j["expected_accuracy"]) << "\n"
              << "  per order          " << percent(j["expected_per_order"]["1"]) << " / "
              << percent(j["expected_per_order"]["2"]) << " / "
              << percent(j["expected_per_order"]["3"]) << "\n"
              << "  monte carlo        " << percent(j["mc_mean"]) << " +- "
              << percent(j["mc_stddev"]) << " (" << j["trials"] << " trials)\n";
    return kExitOk;
}

struct EvaluateArgs {
    std::string benchmark;
    std::string predictions;
    std::string report;
};

int run_evaluate(const EvaluateArgs& a) {
    auto bench = load_benchmark(a.benchmark);
    char* report = nullptr;
    check(ctom_evaluate_file(bench.get(), a.predictions.c_str(), &report), "scoring predictions");
    CString owned(report);
    write_text(a.report, report);
    auto j = parse_json(owned);
    const auto& acc = j["per_order_accuracy"];
    const auto& corr = j["correlations"];
    std::cout << "accuracy     total " << percent(j["total_accuracy"]) << "  1st "
              << percent(acc["1"]) << "  2nd " << percent(acc["2"]) << "  3rd "
              << percent(acc["3"]) << '\n'
              << "consistency  " << percent(j["consistency"]) << " over " << j["propositions"]
              << " propositions\n"
              << "correlation  r(1,2)=" << fixed(corr["1-2"]) << "  r(1,3)=" << fixed(corr["1-3"])
              << "  r(2,3)=" << fixed(corr["2-3"]) << '\n'
              << "answered     " << j["counts"]["answered"] << "/" << j["counts"]["total"]
              << " (" << j["counts"]["unparseable"] << " unparseable)\n";
    return kExitOk;
}

struct StatsArgs {
    std::string benchmark;
    std::string corpus;
    std::string json_out;
};

int run_stats(const StatsArgs& a) {
    auto bench = load_benchmark(a.benchmark);
    CorpusPtr corpus;
    if (!a.corpus.empty()) corpus = load_corpus(a.corpus);
    char* counts = nullptr;
    check(ctom_benchmark_split_counts(bench.get(), corpus.get(), &counts), "counting");
    CString owned(counts);
    if (!a.json_out.empty()) write_text(a.json_out, counts);
    auto j = parse_json(owned);
    std::cout << "Split  Answer  Count\n";
    for (const char* split : {"train", "test", "none"}) {
        auto yes = j[split]["yes"].get<std::size_t>();
        auto no = j[split]["no"].get<std::size_t>();
        if (yes + no == 0 && std::string(split) == "none") continue;
        std::string name = split;
        name[0] = static_cast<char>(std::toupper(name[0]));
        std::printf("%-6s No      %zu\n%-6s Yes     %zu\n", name.c_str(), no, "", yes);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Theory-of-mind QA benchmark toolkit over common-ground annotated dialogs",
                 "commontom"};
    app.set_version_flag("--version", std::string("commontom ") + ctom_version());
    app.require_subcommand(1);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Check a corpus against the data model");
    validate->add_option("--corpus", va.corpus, "Corpus JSONL")->required();
    validate->add_option("--report", va.report, "Write the violation report as JSON");

    InferArgs ia;
    auto* infer = app.add_subcommand("infer-cg", "Replace CG labels with rule-inferred ones");
    infer->add_option("--corpus", ia.corpus, "Corpus JSONL")->required();
    infer->add_option("--out", ia.out, "Output corpus JSONL")->required();
    infer->add_option("--report", ia.report, "Also write the divergence report to a file");

    GenerateArgs ga;
    auto* generate = app.add_subcommand("generate", "Build a benchmark from a corpus");
    generate->add_option("--corpus", ga.corpus, "Corpus JSONL")->required();
    generate->add_option("--rate", ga.rate, "Keep rate for CT+/CT+/JA/JA points")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    generate->add_option("--seed", ga.seed, "Sampling seed")->capture_default_str();
    generate->add_option("--out", ga.out, "Benchmark JSONL")->required();

    AnswerArgs aa;
    auto* answer = app.add_subcommand("answer", "Fill gold answers from corpus annotations");
    answer->add_option("--benchmark", aa.benchmark, "Benchmark JSONL")->required();
    answer->add_option("--corpus", aa.corpus, "Corpus JSONL")->required();
    answer->add_option("--out", aa.out, "Benchmark JSONL with gold")->required();

    RunModelArgs ra;
    auto* runm = app.add_subcommand("run-model", "Query a chat-completions endpoint");
    runm->add_option("--benchmark", ra.benchmark, "Benchmark JSONL")->required();
    runm->add_option("--corpus", ra.corpus, "Corpus JSONL")->required();
    runm->add_option("--base-url", ra.base_url, "Endpoint base URL, e.g. http://host:8000/v1")
        ->required();
    runm->add_option("--model", ra.model, "Model name")->required();
    runm->add_option("--auth-env", ra.auth_env, "Environment variable holding the API key");
    runm->add_option("--concurrency", ra.concurrency, "Requests in flight")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    runm->add_option("--max-attempts", ra.max_attempts, "Attempts per query")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    runm->add_option("--backoff-ms", ra.backoff_ms, "Retry waits in ms")
        ->delimiter(',')
        ->capture_default_str();
    runm->add_option("--timeout-ms", ra.timeout_ms, "Per-request timeout")->capture_default_str();
    runm->add_option("--context-before", ra.context_before, "Turns before the anchor")
        ->capture_default_str();
    runm->add_option("--context-after", ra.context_after, "Turns after the anchor")
        ->capture_default_str();
    runm->add_option("--temperature", ra.temperature, "Sampling temperature")->capture_default_str();
    runm->add_option("--out", ra.out, "Predictions JSONL")->required();
    runm->add_option("--log", ra.log, "Run log JSONL");

    BaselineArgs ba;
    auto* baseline = app.add_subcommand("baseline", "Frequency-matched random baseline");
    baseline->add_option("--benchmark", ba.benchmark, "Benchmark JSONL with gold")->required();
    baseline->add_option("--train-freqs", ba.train_freqs, "Training yes,no counts")
        ->required()
        ->delimiter(',')
        ->expected(2);
    baseline->add_option("--seed", ba.seed, "Monte-Carlo seed")->capture_default_str();
    baseline->add_option("--trials", ba.trials, "Monte-Carlo trials")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    baseline->add_option("--report", ba.report, "Write the report as JSON");

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold");
    evaluate->add_option("--benchmark", ea.benchmark, "Benchmark JSONL with gold")->required();
    evaluate->add_option("--predictions", ea.predictions, "Predictions JSONL")->required();
    evaluate->add_option("--report", ea.report, "Metrics report JSON")->required();

    StatsArgs sa;
    auto* stats = app.add_subcommand("stats", "Yes/no answer counts per split");
    stats->add_option("--benchmark", sa.benchmark, "Benchmark JSONL with gold")->required();
    stats->add_option("--corpus", sa.corpus, "Corpus JSONL for split metadata");
    stats->add_option("--json", sa.json_out, "Write the counts as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*validate) return run_validate(va);
        if (*infer) return run_infer_cg(ia);
        if (*generate) return run_generate(ga);
        if (*answer) return run_answer(aa);
        if (*runm) return run_model(ra);
        if (*baseline) return run_baseline(ba);
        if (*evaluate) return run_evaluate(ea);
        if (*stats) return run_stats(sa);
    } catch (const CommandError& e) {
        std::cerr << "commontom: " << e.what() << '\n';
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "commontom: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
