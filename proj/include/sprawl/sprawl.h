/* SPDX-License-Identifier: Apache-2.0 */
/* C interface to the sprawl index library. Every fallible call returns a
 * sprawl_status; on failure sprawl_last_error() describes the problem (the
 * message is thread-local and valid until the next call on that thread).
 * Objects are opaque handles released with the matching *_free function.
 * Strings returned through char** are released with sprawl_string_free. */
#ifndef SPRAWL_SPRAWL_H
#define SPRAWL_SPRAWL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SPRAWL_API __declspec(dllexport)
#else
#define SPRAWL_API __attribute__((visibility("default")))
#endif

typedef enum sprawl_status {
    SPRAWL_OK = 0,
    SPRAWL_ERR_INVALID_INPUT = 1,
    SPRAWL_ERR_INVALID_STATE = 2,
    SPRAWL_ERR_IO = 3,
    SPRAWL_ERR_PARSE = 4,
    SPRAWL_ERR_INTERNAL = 5
} sprawl_status;

typedef struct sprawl_dataset sprawl_dataset;
typedef struct sprawl_index sprawl_index;
typedef struct sprawl_result sprawl_result;

SPRAWL_API const char* sprawl_last_error(void);
SPRAWL_API const char* sprawl_status_name(sprawl_status status);
SPRAWL_API void sprawl_string_free(char* s);

/* A query object: a vector (vec/dim) when vec is non-NULL, else a
 * NUL-terminated string. */
typedef struct sprawl_object {
    const double* vec;
    size_t dim;
    const char* str;
} sprawl_object;

/* ---- datasets ---- */

/* source: generator spec ("uniform(2,1000)", "clusters(2,1000,10,0.02)",
 * "words(500)") or a file path. kind: NULL (by extension: .csv = vectors,
 * otherwise strings), "vectors" or "strings". */
SPRAWL_API sprawl_status sprawl_dataset_load(const char* source, const char* kind, sprawl_dataset** out);
SPRAWL_API sprawl_status sprawl_dataset_from_vectors(const double* data, size_t n, size_t dim, sprawl_dataset** out);
SPRAWL_API sprawl_status sprawl_dataset_from_strings(const char* const* strings, size_t n, sprawl_dataset** out);
SPRAWL_API size_t sprawl_dataset_size(const sprawl_dataset* d);
/* 0 for string datasets. */
SPRAWL_API size_t sprawl_dataset_dim(const sprawl_dataset* d);
SPRAWL_API int sprawl_dataset_is_strings(const sprawl_dataset* d);
/* View of object i; pointers stay valid while the dataset lives. */
SPRAWL_API sprawl_status sprawl_dataset_object(const sprawl_dataset* d, size_t i, sprawl_object* out);
SPRAWL_API void sprawl_dataset_free(sprawl_dataset* d);

/* ---- build parameters ---- */

typedef struct sprawl_build_params {
    size_t arity;
    size_t leaf_capacity;
    size_t pivot_count;
    double shell_width;
    uint64_t seed;
    const char* heuristic;  /* "lb_sum" | "lb_max" */
    const char* laesa_mode; /* "eliminate" | "discover" */
    uint32_t piaesa_switch;
    int tight;
} sprawl_build_params;

SPRAWL_API void sprawl_build_params_default(sprawl_build_params* p);

/* ---- indexes ---- */

/* kind: linear, bs_tree, ball_tree, vp_tree, bk_tree, gnat, gh_tree,
 * voronoi_tree, m_tree, laesa, aesa, pm_tree, vp_forest.
 * metric: l2, l1, levenshtein, hamming. params may be NULL for defaults. */
SPRAWL_API sprawl_status sprawl_index_build(const sprawl_dataset* d, const char* kind, const char* metric,
                                            const sprawl_build_params* params, sprawl_index** out);
SPRAWL_API sprawl_status sprawl_index_save(const sprawl_index* idx, const char* path);
/* Loads and validates. */
SPRAWL_API sprawl_status sprawl_index_load(const char* path, sprawl_index** out);
SPRAWL_API sprawl_status sprawl_index_serialize(const sprawl_index* idx, char** out, size_t* len);
/* Loads without requiring validity and reports the validation outcome.
 * *passed is 1 or 0; *report is a multi-line diagnostic. */
SPRAWL_API sprawl_status sprawl_index_validate_file(const char* path, int* passed, char** report);
SPRAWL_API size_t sprawl_index_size(const sprawl_index* idx);
SPRAWL_API size_t sprawl_index_region_count(const sprawl_index* idx);
SPRAWL_API uint64_t sprawl_index_build_distances(const sprawl_index* idx);
SPRAWL_API const char* sprawl_index_label(const sprawl_index* idx);
SPRAWL_API const char* sprawl_index_metric(const sprawl_index* idx);
/* The indexed objects as a dataset copy. */
SPRAWL_API sprawl_status sprawl_index_dataset(const sprawl_index* idx, sprawl_dataset** out);
SPRAWL_API void sprawl_index_free(sprawl_index* idx);

/* ---- queries ---- */

SPRAWL_API sprawl_status sprawl_range(const sprawl_index* idx, sprawl_object q, double radius, sprawl_result** out);
SPRAWL_API sprawl_status sprawl_knn(const sprawl_index* idx, sprawl_object q, size_t k, sprawl_result** out);
/* Linear query ambit over m foci: rows x m coefficients (row-major) and
 * rows radii; objects u with coeffs . [d(f_j, u)]_j <= radii hold. */
SPRAWL_API sprawl_status sprawl_ambit(const sprawl_index* idx, const sprawl_object* foci, size_t m,
                                      const double* coeffs, size_t rows, const double* radii, sprawl_result** out);

/* Exhaustive scans over the indexed objects; distance_count is n. */
SPRAWL_API sprawl_status sprawl_oracle_range(const sprawl_index* idx, sprawl_object q, double radius,
                                             sprawl_result** out);
SPRAWL_API sprawl_status sprawl_oracle_knn(const sprawl_index* idx, sprawl_object q, size_t k, sprawl_result** out);
SPRAWL_API sprawl_status sprawl_oracle_ambit(const sprawl_index* idx, const sprawl_object* foci, size_t m,
                                             const double* coeffs, size_t rows, const double* radii,
                                             sprawl_result** out);

/* 1 when two results agree: same id set, or for kNN results the same
 * distance multiset. */
SPRAWL_API int sprawl_result_matches(const sprawl_result* got, const sprawl_result* truth);

SPRAWL_API size_t sprawl_result_count(const sprawl_result* r);
SPRAWL_API uint32_t sprawl_result_id(const sprawl_result* r, size_t i);
SPRAWL_API double sprawl_result_distance(const sprawl_result* r, size_t i);
SPRAWL_API uint64_t sprawl_result_distance_count(const sprawl_result* r);
SPRAWL_API uint64_t sprawl_result_regions_checked(const sprawl_result* r);
SPRAWL_API uint64_t sprawl_result_regions_pruned(const sprawl_result* r);
SPRAWL_API uint64_t sprawl_result_points_eliminated(const sprawl_result* r);
SPRAWL_API void sprawl_result_free(sprawl_result* r);

/* ---- workloads ---- */

/* count perturbed copies of indexed objects, as a dataset. */
SPRAWL_API sprawl_status sprawl_index_sample_queries(const sprawl_index* idx, size_t count, uint64_t seed,
                                                     sprawl_dataset** out);
/* Radius whose ball around q holds about `selectivity` of the objects. */
SPRAWL_API sprawl_status sprawl_index_calibrate_radius(const sprawl_index* idx, sprawl_object q, double selectivity,
                                                       uint64_t seed, double* out);

typedef struct sprawl_bench_summary {
    size_t records;
    size_t failures; /* records that errored or disagreed with the oracle */
} sprawl_bench_summary;

/* Builds each index in the comma-separated list over the dataset, runs the
 * workload ("range:100@0.01+knn:50@10+hyperplane:50+ellipse:50@0.01")
 * and writes a report ("jsonl" or "csv") to report_path (NULL: no file).
 * *summary_text (may be NULL) receives the per-builder summary table. */
SPRAWL_API sprawl_status sprawl_bench_run(const sprawl_dataset* d, const char* metric, const char* indexes,
                                          const sprawl_build_params* params, const char* workload, uint64_t seed,
                                          int verify, unsigned threads, const char* report_path, const char* format,
                                          sprawl_bench_summary* out, char** summary_text);

#ifdef __cplusplus
}
#endif

#endif /* SPRAWL_SPRAWL_H */
