/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef LDSM_LDSM_H
#define LDSM_LDSM_H

#include <stddef.h>
#include <stdint.h>

#if defined(LDSM_BUILDING_LIBRARY)
#define LDSM_API __attribute__((visibility("default")))
#else
#define LDSM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure a message describing the
 * error is available from ldsm_last_error() on the same thread. */
typedef enum ldsm_status {
    LDSM_OK = 0,
    LDSM_ERR_INVALID_ARGUMENT = 1, /* bad parameter or null pointer */
    LDSM_ERR_IO = 2,               /* file could not be opened, read or written */
    LDSM_ERR_PARSE = 3,            /* malformed dataset, prediction or propensity file */
    LDSM_ERR_FORMAT = 4,           /* corrupt or incompatible model file */
    LDSM_ERR_DATA = 5,             /* data unusable for the request, e.g. no labelled example */
    LDSM_ERR_INTERNAL = 6
} ldsm_status;

LDSM_API const char* ldsm_last_error(void);
LDSM_API const char* ldsm_status_string(ldsm_status status);
LDSM_API const char* ldsm_version(void);

typedef struct ldsm_dataset ldsm_dataset;
typedef struct ldsm_model ldsm_model;
typedef struct ldsm_predictions ldsm_predictions;
typedef struct ldsm_report ldsm_report;
typedef struct ldsm_validation ldsm_validation;

/* ---- datasets ---- */

typedef struct ldsm_dataset_info {
    size_t examples;
    size_t features;
    size_t labels;
    size_t unlabelled_examples;
    size_t duplicate_labels_dropped;
} ldsm_dataset_info;

LDSM_API ldsm_status ldsm_dataset_load(const char* path, ldsm_dataset** out);
LDSM_API void ldsm_dataset_free(ldsm_dataset* data);
LDSM_API ldsm_status ldsm_dataset_info_get(const ldsm_dataset* data, ldsm_dataset_info* out);

/* ---- training ---- */

typedef enum ldsm_optimizer { LDSM_SGD = 0, LDSM_NAG = 1 } ldsm_optimizer;

typedef struct ldsm_train_params {
    int arity;                 /* M, children per node */
    size_t max_nodes;          /* T_max per tree */
    int epochs;                /* passes over each node's examples */
    double lambda1;
    double lambda2;
    ldsm_optimizer optimizer;
    double step_size;
    double momentum;           /* NAG only */
    size_t min_split_examples; /* smaller children stay leaves */
    size_t top_r;              /* default prediction length */
    size_t trees;
    uint64_t seed;             /* tree i uses seed + i */
    size_t threads;            /* 0 = hardware concurrency */
} ldsm_train_params;

LDSM_API void ldsm_train_params_default(ldsm_train_params* params);

/* Validates params. *n_warnings receives the number of advisory warnings
 * (values outside the usual grid), readable with ldsm_warning(). */
LDSM_API ldsm_status ldsm_train_params_check(const ldsm_train_params* params, size_t* n_warnings);
LDSM_API const char* ldsm_warning(size_t index);

LDSM_API ldsm_status ldsm_train(const ldsm_dataset* data, const ldsm_train_params* params, ldsm_model** out);

/* ---- models ---- */

LDSM_API ldsm_status ldsm_model_save(const ldsm_model* model, const char* path);
/* Like ldsm_model_save but stores weights as 32-bit floats. */
LDSM_API ldsm_status ldsm_model_save_compact(const ldsm_model* model, const char* path);
LDSM_API ldsm_status ldsm_model_load(const char* path, ldsm_model** out);
LDSM_API void ldsm_model_free(ldsm_model* model);

typedef struct ldsm_model_info {
    size_t trees;
    size_t features;
    size_t labels;
    int arity;
    size_t max_depth;
    size_t nodes;    /* summed over trees */
    size_t leaves;   /* summed over trees */
    uint64_t base_seed;
    size_t top_r;
} ldsm_model_info;

typedef struct ldsm_tree_info {
    size_t nodes;
    size_t internal;
    size_t leaves;
    size_t depth;
} ldsm_tree_info;

typedef struct ldsm_node_info {
    uint32_t parent; /* UINT32_MAX for the root */
    uint32_t depth;
    int is_leaf;
    uint32_t examples;
    size_t histogram_labels;
    double objective;    /* internal nodes only */
    double balancedness;
    double purity;
} ldsm_node_info;

LDSM_API ldsm_status ldsm_model_info_get(const ldsm_model* model, ldsm_model_info* out);
LDSM_API ldsm_status ldsm_model_tree_info(const ldsm_model* model, size_t tree, ldsm_tree_info* out);
LDSM_API ldsm_status ldsm_model_node_info(const ldsm_model* model, size_t tree, uint32_t node, ldsm_node_info* out);

/* Average number of leaves reached per example and tree. */
LDSM_API ldsm_status ldsm_model_avg_leaves(const ldsm_model* model, const ldsm_dataset* data, double* out);

/* CSV "tree,node,parent,depth,examples,objective,balancedness,purity", one
 * row per internal node in expansion order. */
LDSM_API ldsm_status ldsm_model_write_node_trace(const ldsm_model* model, const char* path);

/* ---- prediction ---- */

/* top_r == 0 uses the model's stored default. */
LDSM_API ldsm_status ldsm_predict(const ldsm_model* model, const ldsm_dataset* data, size_t top_r, size_t threads,
                                  ldsm_predictions** out);

/* Predicts one sparse example. indices must be strictly increasing. Writes up
 * to capacity entries and stores the number written in *written. */
LDSM_API ldsm_status ldsm_predict_one(const ldsm_model* model, const uint32_t* indices, const double* values,
                                      size_t nnz, size_t top_r, uint32_t* labels, double* scores, size_t capacity,
                                      size_t* written);

LDSM_API ldsm_status ldsm_predictions_load(const char* path, ldsm_predictions** out);
LDSM_API ldsm_status ldsm_predictions_save(const ldsm_predictions* preds, const char* path);
LDSM_API size_t ldsm_predictions_count(const ldsm_predictions* preds);
/* Pointers stay valid until the predictions are freed. */
LDSM_API ldsm_status ldsm_predictions_get(const ldsm_predictions* preds, size_t index, const uint32_t** labels,
                                          const double** scores, size_t* length);
LDSM_API void ldsm_predictions_free(ldsm_predictions* preds);

/* ---- evaluation ---- */

typedef struct ldsm_eval_options {
    const size_t* ks; /* null means {1, 3, 5} */
    size_t n_ks;
    /* Propensity-scored metrics are added when either source is set; the
     * file wins over the training set. */
    const ldsm_dataset* propensity_train;
    const char* propensity_file;
    double propensity_a;
    double propensity_b;
} ldsm_eval_options;

LDSM_API void ldsm_eval_options_default(ldsm_eval_options* opts);
LDSM_API ldsm_status ldsm_evaluate(const ldsm_predictions* preds, const ldsm_dataset* gold,
                                   const ldsm_eval_options* opts, ldsm_report** out);
LDSM_API size_t ldsm_report_size(const ldsm_report* report);
LDSM_API ldsm_status ldsm_report_entry(const ldsm_report* report, size_t index, const char** metric, size_t* k,
                                       double* value);
LDSM_API size_t ldsm_report_examples(const ldsm_report* report);
LDSM_API size_t ldsm_report_excluded(const ldsm_report* report);
LDSM_API ldsm_status ldsm_report_save_csv(const ldsm_report* report, const char* path);
LDSM_API void ldsm_report_free(ldsm_report* report);

/* ---- theory validation ---- */

typedef struct ldsm_validation_options {
    size_t samples; /* random node splits per suite */
    uint64_t seed;
    int lemma_suites;
    int synthetic;
    const ldsm_model* model; /* optional; checked against data */
    const ldsm_dataset* data;
    size_t top_r;
} ldsm_validation_options;

typedef struct ldsm_check_info {
    const char* name;
    int passed;
    int gating;
    size_t samples;
    size_t violations;
    size_t skipped;
    double min_value;
    double max_value;
    const char* detail;
} ldsm_check_info;

LDSM_API void ldsm_validation_options_default(ldsm_validation_options* opts);
/* Returns LDSM_OK whenever the checks ran; use ldsm_validation_passed(). */
LDSM_API ldsm_status ldsm_validate(const ldsm_validation_options* opts, ldsm_validation** out);
LDSM_API int ldsm_validation_passed(const ldsm_validation* v);
LDSM_API size_t ldsm_validation_size(const ldsm_validation* v);
LDSM_API ldsm_status ldsm_validation_check(const ldsm_validation* v, size_t index, ldsm_check_info* out);
LDSM_API ldsm_status ldsm_validation_save_csv(const ldsm_validation* v, const char* path);
/* Human-readable table; the string lives as long as the handle. */
LDSM_API const char* ldsm_validation_text(const ldsm_validation* v);
LDSM_API void ldsm_validation_free(ldsm_validation* v);

#ifdef __cplusplus
}
#endif

#endif
