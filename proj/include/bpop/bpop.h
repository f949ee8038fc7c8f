/* C interface to the partial-order inference and execution engine.
 *
 * All objects are opaque handles created and released through this API.
 * Every fallible call returns a bpop_status; on failure the out-parameters
 * are untouched and bpop_last_error() describes what went wrong (the message
 * is thread-local and valid until the next failing call on that thread).
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with bpop_string_free().
 */
#ifndef BPOP_H
#define BPOP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bpop_status {
    BPOP_OK = 0,
    BPOP_EINVAL = 1,          /* argument outside its documented range */
    BPOP_EIO = 2,             /* file could not be read or written */
    BPOP_ESCHEMA = 3,         /* malformed JSON input */
    BPOP_ECYCLE = 4,          /* edge set contains a directed cycle */
    BPOP_EUNKNOWN_ACTION = 5, /* name not present in the catalog */
    BPOP_ETOO_LARGE = 6,      /* enumeration beyond the configured cap */
    BPOP_EUNREACHABLE = 7,    /* coverage target not reached in budget */
    BPOP_EEMPTY = 8,          /* empty input where content is required */
    BPOP_ECATALOG = 9,        /* catalogs of two inputs do not match */
    BPOP_EREGISTRY = 10,      /* IO registry does not cover the catalog */
    BPOP_EINTERNAL = 11
} bpop_status;

typedef struct bpop_graph bpop_graph;       /* action catalog + partial order */
typedef struct bpop_traces bpop_traces;     /* trace set over a catalog */
typedef struct bpop_chain bpop_chain;       /* posterior samples */
typedef struct bpop_scenario bpop_scenario; /* IO registry + truth + failures */

const char* bpop_version(void);
const char* bpop_last_error(void);
void bpop_string_free(char* s);

/* ---- graphs ---- */

bpop_status bpop_graph_load(const char* path, bpop_graph** out);
bpop_status bpop_graph_from_json(const char* text, bpop_graph** out);
bpop_status bpop_graph_to_json(const bpop_graph* g, char** out);
bpop_status bpop_graph_to_dot(const bpop_graph* g, char** out);
int bpop_graph_size(const bpop_graph* g);
/* Exact linear-extension count; cap <= 0 selects the default cap (20). */
bpop_status bpop_graph_count_extensions(const bpop_graph* g, int cap, unsigned long long* out);
void bpop_graph_free(bpop_graph* g);

/* ---- traces ---- */

bpop_status bpop_traces_load(const char* path, bpop_traces** out);
bpop_status bpop_traces_from_json(const char* text, bpop_traces** out);
bpop_status bpop_traces_to_json(const bpop_traces* t, char** out);
/* Re-indexes the traces onto the graph's catalog (names must all resolve). */
bpop_status bpop_traces_remap(const bpop_traces* t, const bpop_graph* g, bpop_traces** out);
int bpop_traces_count(const bpop_traces* t);
void bpop_traces_free(bpop_traces* t);

bpop_status bpop_ip_coverage(const bpop_traces* t, const bpop_graph* truth, double* out);

/* Curates synthetic traces from the truth order until the incomparable-pair
 * coverage target is met; tops up to min_traces afterwards. */
bpop_status bpop_simulate(const bpop_graph* truth, double target_ip_cov, unsigned long long seed,
                          int max_attempts, int min_traces, bpop_traces** out);

bpop_status bpop_dataset_loglik(const bpop_graph* g, const bpop_traces* t, double beta,
                                double epsilon, double* out);

/* ---- inference ---- */

/* Runs one MCMC chain configured by config_json and streams it to out_path
 * (JSON lines: one header, then one record per retained sample). */
bpop_status bpop_run_chain(const char* config_json, const bpop_traces* t,
                           unsigned long long seed, const char* out_path);

/* Loads one or more chain files produced with the same config and catalog. */
bpop_status bpop_chain_load(const char* const* paths, int n, bpop_chain** out);
int bpop_chain_sample_count(const bpop_chain* c);
bpop_status bpop_chain_marginals_csv(const bpop_chain* c, char** out);
bpop_status bpop_estimate_threshold(const bpop_chain* c, double alpha, bpop_graph** out);
bpop_status bpop_estimate_mode(const bpop_chain* c, bpop_graph** out);
void bpop_chain_free(bpop_chain* c);

/* ---- scoring ---- */

/* Structural-recovery report (precision/recall/F1, SHD, feasibility,
 * IP-Cov, IP-F1) as a JSON object. */
bpop_status bpop_evaluate(const bpop_graph* estimate, const bpop_graph* truth,
                          const bpop_traces* t, char** report_json);

bpop_status bpop_baseline_majority(const bpop_traces* t, double tau, bpop_graph** out);
bpop_status bpop_baseline_heuristics(const bpop_traces* t, double delta, bpop_graph** out);

/* ---- execution ---- */

bpop_status bpop_scenario_load(const char* path, bpop_scenario** out);
bpop_status bpop_scenario_from_json(const char* text, bpop_scenario** out);
/* The scenario's ground-truth dependency order as a graph handle. */
bpop_status bpop_scenario_truth(const bpop_scenario* s, bpop_graph** out);
void bpop_scenario_free(bpop_scenario* s);

/* mode is "expert" or "hybrid"; returns the execution report as JSON. */
bpop_status bpop_execute(const bpop_graph* sop, const bpop_scenario* s, const char* mode,
                         unsigned long long seed, char** report_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BPOP_H */
