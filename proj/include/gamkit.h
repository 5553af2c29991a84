#ifndef GAMKIT_H
#define GAMKIT_H

/* C interface to the litmus-test memory model toolkit. All handles are
 * opaque; every function reports errors through the gk_status return.
 * Strings written to an out parameter are heap-allocated and must be
 * released with gk_free_string; const char* accessors stay valid until
 * the owning handle is freed. */

#include <stddef.h>
#include <stdint.h>

#if defined(__cplusplus)
extern "C" {
#endif

typedef enum gk_status {
  GK_OK = 0,
  GK_ERR_INVALID_ARG = 1,
  GK_ERR_PARSE = 2,
  GK_ERR_UNSUPPORTED = 3, /* model has no such engine */
  GK_ERR_BUDGET = 4,      /* enumeration or state budget exceeded */
  GK_ERR_IO = 5,
  GK_ERR_INTERNAL = 6
} gk_status;

typedef enum gk_model {
  GK_MODEL_SC = 0,
  GK_MODEL_GAM0 = 1,
  GK_MODEL_GAM = 2,
  GK_MODEL_GAM_ARM = 3
} gk_model;

typedef enum gk_engine {
  GK_ENGINE_AXIOMATIC = 0,
  GK_ENGINE_OPERATIONAL = 1
} gk_engine;

typedef struct gk_program gk_program;
typedef struct gk_options gk_options;
typedef struct gk_verdict gk_verdict;

const char* gk_version(void);
const char* gk_status_str(gk_status s);
void gk_free_string(char* s);

/* ---- programs ---- */

gk_status gk_parse(const char* source, gk_program** out, char** err_out);
gk_status gk_parse_file(const char* path, gk_program** out, char** err_out);
void gk_program_free(gk_program* p);

const char* gk_program_name(const gk_program* p);
int gk_program_thread_count(const gk_program* p);
/* 1 allowed, 0 forbidden, -1 when the program records no expectation. */
int gk_program_expectation(const gk_program* p, gk_model m);
/* Canonical litmus text (round-trips through the parser). */
gk_status gk_program_source(const gk_program* p, char** out);

/* ---- engine options ---- */

gk_options* gk_options_new(void);
void gk_options_free(gk_options* o);
void gk_options_set_mem_bound(gk_options* o, int bound);
void gk_options_set_state_budget(gk_options* o, uint64_t budget);
void gk_options_set_trace(gk_options* o, int enable);
void gk_options_set_ppo_dump(gk_options* o, int enable);

/* ---- checking ---- */

gk_status gk_check(const gk_program* p, gk_model m, gk_engine e,
                   const gk_options* o, gk_verdict** out, char** err_out);
void gk_verdict_free(gk_verdict* v);

int gk_verdict_allowed(const gk_verdict* v);
size_t gk_verdict_outcome_count(const gk_verdict* v);
const char* gk_verdict_outcome(const gk_verdict* v, size_t i);
/* NULL when the verdict carries no witness / stats / trace / dump. */
const char* gk_verdict_witness_json(const gk_verdict* v);
const char* gk_verdict_stats_json(const gk_verdict* v);
const char* gk_verdict_trace(const gk_verdict* v);
const char* gk_verdict_ppo_dump(const gk_verdict* v);
/* Full report object for this verdict, including the expectation. */
const char* gk_verdict_report_json(const gk_verdict* v);

/* Runs both engines and compares outcome sets. pass_out gets 1 only when
 * both engines ran and agreed; the JSON report carries the details
 * (including budget inconclusiveness). */
gk_status gk_crosscheck(const gk_program* p, gk_model m, const gk_options* o,
                        int* pass_out, char** report_json_out, char** err_out);

/* ---- built-in corpus ---- */

size_t gk_corpus_count(void);
const char* gk_corpus_name(size_t i);
const char* gk_corpus_source(size_t i);

/* Every corpus program under every model and engine, compared against the
 * frozen expectations. */
gk_status gk_run_corpus(const gk_options* o, int* pass_out,
                        char** report_json_out, char** err_out);

/* ---- fuzzing ---- */

typedef struct gk_fuzz_bounds {
  uint64_t seed;
  int max_threads;
  int max_instrs_per_thread;
  int max_addrs;
  const int64_t* values; /* may be NULL for the default set */
  size_t value_count;
  double fence_prob;
  double branch_prob;
  int mem_instance_bound;
} gk_fuzz_bounds;

void gk_fuzz_bounds_default(gk_fuzz_bounds* b);
gk_status gk_fuzz_program(const gk_fuzz_bounds* b, char** litmus_out,
                          char** err_out);
gk_status gk_run_fuzz_suite(const gk_fuzz_bounds* b, int count,
                            const gk_options* o, int* pass_out,
                            char** report_json_out, char** err_out);

#if defined(__cplusplus)
}
#endif

#endif /* GAMKIT_H */
