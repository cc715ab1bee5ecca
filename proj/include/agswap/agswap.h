/*
 * Copyright (C) 2026 AGSwap contributors
 * SPDX-License-Identifier: Apache-2.0
 */

/*
 * C interface to the AGSwap library: adaptive group swapping of text
 * embeddings, generation oracles, and COF dataset construction.
 *
 * Conventions
 *   - Every function returns an agswap_status. AGSWAP_OK is 0.
 *   - On failure, agswap_last_error() returns a message for the calling
 *     thread; it stays valid until that thread's next call into the library.
 *   - Objects are opaque handles created by *_create / *_load functions and
 *     released by the matching *_destroy. Destroying NULL is a no-op.
 *   - Exchange-vector positions are 1-based in every serialized form.
 */
#ifndef AGSWAP_AGSWAP_H
#define AGSWAP_AGSWAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AGSWAP_BUILDING_LIBRARY)
#    define AGSWAP_API __declspec(dllexport)
#  else
#    define AGSWAP_API __declspec(dllimport)
#  endif
#else
#  define AGSWAP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum agswap_status {
    AGSWAP_OK = 0,
    AGSWAP_E_INVALID_ARGUMENT = 1,
    AGSWAP_E_SHAPE_MISMATCH = 2,
    AGSWAP_E_INVALID_WIDTH = 3,
    AGSWAP_E_INDEX_OUT_OF_BOUNDS = 4,
    AGSWAP_E_LENGTH_MISMATCH = 5,
    AGSWAP_E_NOT_UNIT_NORM = 6,
    AGSWAP_E_NON_FINITE = 7,
    AGSWAP_E_BIAS_UNRESOLVABLE = 8,
    AGSWAP_E_WIDTH_TOO_LARGE = 9,
    AGSWAP_E_ORACLE_FAILURE = 10,
    AGSWAP_E_PROTOCOL = 11,
    AGSWAP_E_UNKNOWN_CATEGORY = 12,
    AGSWAP_E_NO_PATH_TO_ROOT = 13,
    AGSWAP_E_CONFLICTING_LISTS = 14,
    AGSWAP_E_INSUFFICIENT_HYPONYMS = 15,
    AGSWAP_E_INVALID_GRAPH = 16,
    AGSWAP_E_IO = 17,
    AGSWAP_E_INTERNAL = 99
} agswap_status;

typedef struct agswap_bundle agswap_bundle;
typedef struct agswap_oracle agswap_oracle;
typedef struct agswap_result agswap_result;

AGSWAP_API const char* agswap_version(void);
AGSWAP_API const char* agswap_last_error(void);
AGSWAP_API const char* agswap_status_name(agswap_status status);

/* ---- embedding bundles ------------------------------------------------ */

/* base: h*w values, row-major; pooled: q values (q may be 0). */
AGSWAP_API agswap_status agswap_bundle_create(const char* label, size_t h, size_t w, const double* base,
                                              const double* pooled, size_t q, agswap_bundle** out);
AGSWAP_API agswap_status agswap_bundle_from_json(const char* json, agswap_bundle** out);
/* Writes the JSON form into buf (NUL-terminated). *needed receives the size
 * including the terminator; pass buf = NULL to query it. */
AGSWAP_API agswap_status agswap_bundle_to_json(const agswap_bundle* bundle, char* buf, size_t buf_size,
                                               size_t* needed);
AGSWAP_API agswap_status agswap_bundle_dims(const agswap_bundle* bundle, size_t* h, size_t* w, size_t* q);
/* Column mix: column j from e1 where bits[j] = 1, else from e2. */
AGSWAP_API agswap_status agswap_bundle_swap(const agswap_bundle* e1, const agswap_bundle* e2, const uint8_t* bits,
                                            size_t width, agswap_bundle** out);
AGSWAP_API void agswap_bundle_destroy(agswap_bundle* bundle);

/* floor(width/2) ones at seeded positions. */
AGSWAP_API agswap_status agswap_exchange_vector_init(size_t width, uint64_t seed, uint8_t* bits_out);

/* ---- oracles ---------------------------------------------------------- */

typedef enum agswap_nonlinearity { AGSWAP_LINEAR = 0, AGSWAP_TANH = 1 } agswap_nonlinearity;

typedef struct agswap_synthetic_spec {
    uint64_t seed;
    size_t k;
    agswap_nonlinearity nonlinearity;
    size_t h;
    size_t w;
    size_t q;
} agswap_synthetic_spec;

typedef struct agswap_capabilities {
    size_t feature_dim;
    size_t h;
    size_t w;
    size_t q;
    int deterministic;
    size_t max_concurrency;
    char model[128];
} agswap_capabilities;

AGSWAP_API void agswap_synthetic_spec_init(agswap_synthetic_spec* spec);
AGSWAP_API agswap_status agswap_oracle_create_synthetic(const agswap_synthetic_spec* spec, agswap_oracle** out);
/* base_url: scheme://host:port. Retries transport errors and 5xx replies
 * (3 attempts, backoff from 250 ms). */
AGSWAP_API agswap_status agswap_oracle_create_remote(const char* base_url, agswap_oracle** out);
AGSWAP_API agswap_status agswap_oracle_health(agswap_oracle* oracle, agswap_capabilities* out);
AGSWAP_API agswap_status agswap_oracle_encode(agswap_oracle* oracle, const char* prompt, uint64_t seed,
                                              agswap_bundle** out);
/* Unit feature of the image rendered from bundle; feature must hold
 * capabilities.feature_dim doubles. */
AGSWAP_API agswap_status agswap_oracle_generate(agswap_oracle* oracle, const agswap_bundle* bundle, uint64_t seed,
                                                double* feature, size_t feature_len);
AGSWAP_API void agswap_oracle_destroy(agswap_oracle* oracle);

/* ---- fusion ----------------------------------------------------------- */

typedef struct agswap_params {
    double epsilon;          /* 0.01 */
    size_t l_init;           /* 10 */
    size_t delta_l;          /* 2 */
    size_t l_min;            /* 2 */
    size_t flip_threshold;   /* 4 */
    size_t max_iters;        /* 500 */
    uint64_t rng_seed;       /* 0 */
    int use_bias;            /* 0: plain balance score */
    double alpha_left;       /* 0 */
    double alpha_right;      /* 0 */
    double s_beta;           /* 0.05 */
    int literal_direction; /* 0 */
    int refresh_refs_each_iter;  /* 0 */
} agswap_params;

typedef struct agswap_summary {
    int converged;
    size_t iterations;
    size_t best_t;
    double best_abs_s;
    double s;
    double d1;
    double d2;
    double avg_sim;
    double balance;
    size_t width;
} agswap_summary;

AGSWAP_API void agswap_params_init(agswap_params* params);

/* Runs the search. On AGSWAP_E_ORACLE_FAILURE *out may still receive the
 * partial result (NULL if nothing was recorded). */
AGSWAP_API agswap_status agswap_fuse(agswap_oracle* oracle, const agswap_bundle* e1, const agswap_bundle* e2,
                                     const agswap_params* params, agswap_result** out);
/* Encodes "template" with each concept (underscores become spaces), then
 * fuses. template NULL means "A photo of {}". */
AGSWAP_API agswap_status agswap_fuse_concepts(agswap_oracle* oracle, const char* c1, const char* c2,
                                              const char* prompt_template, const agswap_params* params,
                                              agswap_result** out);
AGSWAP_API agswap_status agswap_result_summary(const agswap_result* result, agswap_summary* out);
/* best / final exchange vectors; bits must hold summary.width bytes. */
AGSWAP_API agswap_status agswap_result_best_vector(const agswap_result* result, uint8_t* bits, size_t width);
AGSWAP_API agswap_status agswap_result_final_vector(const agswap_result* result, uint8_t* bits, size_t width);
/* JSON Lines trace: one record per iteration, then {"summary": ...}. */
AGSWAP_API agswap_status agswap_result_write_trace(const agswap_result* result, const char* path);
/* Summary object, including image ids when the oracle reported them. */
AGSWAP_API agswap_status agswap_result_write_json(const agswap_result* result, const char* path);
AGSWAP_API void agswap_result_destroy(agswap_result* result);

/* Exhaustive minimum of |s| over all 2^w vectors, w <= 16. */
AGSWAP_API agswap_status agswap_brute_force(agswap_oracle* oracle, const agswap_bundle* e1, const agswap_bundle* e2,
                                            uint8_t* bits_out, size_t width, double* min_abs_s);

/* ---- batch ------------------------------------------------------------ */

typedef struct agswap_batch_summary {
    size_t pairs;
    size_t succeeded;
    size_t converged;
    double mean_iters;
    double mean_avg_sim;
    double mean_balance;
} agswap_batch_summary;

/* Reads a "left,right" CSV, fuses every pair (seed per pair derived from
 * params->rng_seed), and writes the metrics CSV with a trailing mean row.
 * An empty pair file is AGSWAP_E_INVALID_ARGUMENT ("no pairs"). */
AGSWAP_API agswap_status agswap_batch_run(agswap_oracle* oracle, const char* pairs_csv, const char* prompt_template,
                                          const agswap_params* params, const char* out_csv,
                                          agswap_batch_summary* summary);

/* ---- COF dataset ------------------------------------------------------ */

typedef struct agswap_cof_build_options {
    const char* edges_tsv;
    const char* leaves_txt;
    const char* keep_txt;   /* may be NULL */
    const char* delete_txt; /* may be NULL */
    const char* root;       /* NULL: "object" */
    uint64_t seed;
    size_t per_class;       /* 0: 10 */
} agswap_cof_build_options;

typedef struct agswap_cof_report {
    size_t candidate_count;
    size_t curated_count;
    size_t superclass_count;
    size_t category_count;
    size_t warning_count;
} agswap_cof_report;

typedef enum agswap_pair_mode { AGSWAP_PAIRS_ALL = 0, AGSWAP_PAIRS_TINY = 1 } agswap_pair_mode;

/* Warnings (curation names not found) are written to warnings_out, one per
 * line, when it is non-NULL. */
AGSWAP_API agswap_status agswap_cof_build(const agswap_cof_build_options* options, const char* manifest_out,
                                          const char* warnings_out, agswap_cof_report* report);
/* superclass,subclass CSV with one seeded pick per superclass. */
AGSWAP_API agswap_status agswap_cof_tiny(const char* manifest_path, uint64_t seed, const char* out_csv,
                                         size_t* count);
AGSWAP_API agswap_status agswap_cof_pairs(const char* manifest_path, agswap_pair_mode mode, uint64_t seed,
                                          const char* out_csv, size_t* count);

#ifdef __cplusplus
}
#endif

#endif /* AGSWAP_AGSWAP_H */
