/*
 * commontom C API
 *
 * Stable C interface over the benchmark toolkit: corpus loading and
 * validation, common-ground inference, benchmark generation and gold
 * resolution, scoring, the random baseline and the model runner.
 *
 * Conventions:
 *  - Every fallible call returns ctom_status. On failure a message is
 *    available from ctom_last_error() on the calling thread until the next
 *    call on that thread.
 *  - Objects are opaque handles released with their *_free function.
 *  - Strings returned through char** are NUL-terminated, owned by the caller
 *    and released with ctom_string_free().
 *  - JSON documents returned by the library are UTF-8.
 */
#ifndef COMMONTOM_H
#define COMMONTOM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(COMMONTOM_BUILDING)
#    define CTOM_API __declspec(dllexport)
#  else
#    define CTOM_API __declspec(dllimport)
#  endif
#else
#  define CTOM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctom_status {
    CTOM_OK = 0,
    CTOM_ERR_INVALID_ARGUMENT = 1,
    CTOM_ERR_PARSE = 2,
    CTOM_ERR_VALIDATION = 3,
    CTOM_ERR_NOT_FOUND = 4,
    CTOM_ERR_IO = 5,
    CTOM_ERR_NETWORK = 6,
    CTOM_ERR_AUTH = 7,
    CTOM_ERR_INTERNAL = 99
} ctom_status;

typedef struct ctom_corpus ctom_corpus;
typedef struct ctom_benchmark ctom_benchmark;

CTOM_API const char* ctom_version(void);
CTOM_API const char* ctom_status_string(ctom_status status);
CTOM_API const char* ctom_last_error(void);
CTOM_API void ctom_string_free(char* s);

/* ---- corpus ---------------------------------------------------------- */

/* strict != 0 also rejects data-model violations (see ctom_corpus_validate). */
CTOM_API ctom_status ctom_corpus_load_file(const char* path, int strict, ctom_corpus** out);
CTOM_API ctom_status ctom_corpus_load_buffer(const char* data, size_t len, int strict,
                                             ctom_corpus** out);
CTOM_API void ctom_corpus_free(ctom_corpus* corpus);
CTOM_API size_t ctom_corpus_dialog_count(const ctom_corpus* corpus);
CTOM_API ctom_status ctom_corpus_hash(const ctom_corpus* corpus, char** hash);

/* Report: {"dialogs":n,"violations":[{dialog_id,event_id,turn,rule,detail}]} */
CTOM_API ctom_status ctom_corpus_validate(const ctom_corpus* corpus, char** report_json,
                                          size_t* violation_count);

/* Writes the corpus with cg_a/cg_b replaced by inferred labels to out_path and
 * returns the inferred-vs-gold divergence report. */
CTOM_API ctom_status ctom_corpus_infer_cg(const ctom_corpus* corpus, const char* out_path,
                                          char** report_json);

/* ---- benchmark ------------------------------------------------------- */

CTOM_API ctom_status ctom_benchmark_build(const ctom_corpus* corpus, double rate, uint64_t seed,
                                          ctom_benchmark** out);
CTOM_API ctom_status ctom_benchmark_load_file(const char* path, ctom_benchmark** out);
CTOM_API void ctom_benchmark_free(ctom_benchmark* benchmark);
CTOM_API size_t ctom_benchmark_size(const ctom_benchmark* benchmark);
CTOM_API ctom_status ctom_benchmark_write_file(const ctom_benchmark* benchmark, const char* path);

/* {"tool":..,"version":..,"corpus_hash":..,"seed":..,"rate":..} */
CTOM_API ctom_status ctom_benchmark_provenance(const ctom_benchmark* benchmark, char** json);

/* Re-resolves every gold answer from the corpus annotations. */
CTOM_API ctom_status ctom_benchmark_fill_gold(ctom_benchmark* benchmark, const ctom_corpus* corpus);

/* {"train":{"yes":..,"no":..},"test":{..},"none":{..}}. corpus may be NULL,
 * in which case every dialog counts as split "none". */
CTOM_API ctom_status ctom_benchmark_split_counts(const ctom_benchmark* benchmark,
                                                 const ctom_corpus* corpus, char** json);

/* ---- evaluation ------------------------------------------------------ */

CTOM_API ctom_status ctom_evaluate_file(const ctom_benchmark* benchmark,
                                        const char* predictions_path, char** report_json);

/* train_yes/train_no are answer counts (or frequencies) from the training set. */
CTOM_API ctom_status ctom_random_baseline(const ctom_benchmark* benchmark, double train_yes,
                                          double train_no, uint64_t seed, uint32_t trials,
                                          char** report_json);

/* ---- model runner ---------------------------------------------------- */

typedef struct ctom_run_options {
    const char* base_url;
    const char* model;
    const char* auth_env;       /* NULL or "" for no auth */
    uint32_t max_concurrency;   /* >= 1 */
    uint32_t max_attempts;      /* >= 1 */
    const uint32_t* backoff_ms; /* may be NULL */
    size_t backoff_len;
    uint32_t timeout_ms;
    uint32_t context_before;
    uint32_t context_after;
    double temperature;
} ctom_run_options;

/* Fills defaults: 4 in flight, 3 attempts, 500/2000/8000 ms backoff, 60 s
 * timeout, 5 turns of context each side, temperature 1.0. */
CTOM_API void ctom_run_options_init(ctom_run_options* options);

/* Writes predictions and the run log (partial on abort) and returns a
 * summary. Returns CTOM_ERR_NETWORK after persisting partial output when
 * the endpoint became unreachable. */
CTOM_API ctom_status ctom_run_model(const ctom_benchmark* benchmark, const ctom_corpus* corpus,
                                    const ctom_run_options* options, const char* predictions_path,
                                    const char* log_path, char** summary_json);

/* ---- label algebra --------------------------------------------------- */

/* cg receives "JA", "RT" or "" (no common ground); *underdetermined is set
 * when the rules only establish JA-or-IN. cg must hold at least 3 bytes. */
CTOM_API ctom_status ctom_infer_cg(const char* bel_a, const char* bel_b, char* cg, size_t cg_len,
                                   int* underdetermined);

/* chain is a string of speaker letters, outermost first ("BA", "ABA"). */
CTOM_API ctom_status ctom_resolve_answer(const char* certainty, const char* chain,
                                         const char* bel_a, const char* bel_b, const char* cg_a,
                                         const char* cg_b, int* yes);

CTOM_API ctom_status ctom_render_question(const char* chain, const char* certainty,
                                          const char* proposition, char** out);

/* 1 = yes, 0 = no, -1 = unparseable */
CTOM_API int ctom_parse_answer(const char* raw);

#ifdef __cplusplus
}
#endif

#endif /* COMMONTOM_H */
