/*
 * Copyright 2026 The CEIQ Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libceiq, a no-reference quality metric for
 * contrast-distorted images.
 *
 * Conventions:
 *  - Every fallible call returns a ceiq_status. On failure a description is
 *    available from ceiq_last_error() on the same thread until the next
 *    library call on that thread.
 *  - Objects are opaque handles created by *_load / *_train / ... and
 *    released with the matching *_free. Passing NULL to a *_free is a no-op.
 *  - Strings returned through char** are heap allocated by the library and
 *    must be released with ceiq_free().
 *  - Option structs are initialized with their *_init function; passing a
 *    NULL options pointer means defaults.
 *  - Handles are immutable after construction except where noted, and may
 *    be shared across threads for read-only calls.
 */

#ifndef CEIQ_CEIQ_H_
#define CEIQ_CEIQ_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CEIQ_BUILDING_LIBRARY)
#    define CEIQ_API __declspec(dllexport)
#  else
#    define CEIQ_API __declspec(dllimport)
#  endif
#else
#  define CEIQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ceiq_status {
  CEIQ_OK = 0,
  CEIQ_ERR_INVALID_ARGUMENT = 1,
  CEIQ_ERR_IO = 2,
  CEIQ_ERR_PARSE = 3,
  /* Result undefined for this input: constant score vector, no common
   * histogram support, every evaluation split skipped, ... */
  CEIQ_ERR_DEGENERATE = 4,
  /* SVR solver hit its pass cap. */
  CEIQ_ERR_CONVERGENCE = 5,
  CEIQ_ERR_INTERNAL = 6
} ceiq_status;

typedef enum ceiq_polarity {
  CEIQ_POLARITY_MOS = 0,  /* higher is better */
  CEIQ_POLARITY_DMOS = 1  /* lower is better */
} ceiq_polarity;

CEIQ_API const char* ceiq_version(void);
CEIQ_API const char* ceiq_last_error(void);
CEIQ_API const char* ceiq_status_name(ceiq_status status);
CEIQ_API void ceiq_free(void* p);

/* ------------------------------------------------------------------------ */
/* Features                                                                 */

typedef struct ceiq_features {
  double s_ge; /* SSIM between gray image and its equalized version */
  double e_g;  /* entropy of the gray histogram, bits */
  double e_e;  /* entropy of the equalized histogram, bits */
  double e_ge; /* cross entropy, gray under equalized */
  double e_eg; /* cross entropy, equalized under gray */
} ceiq_features;

typedef struct ceiq_extract_options {
  int bins;                 /* histogram bins, 1..256; default 128 */
  int ssim_auto_downsample; /* nonzero: downsample large images; default 1 */
} ceiq_extract_options;

CEIQ_API void ceiq_extract_options_init(ceiq_extract_options* opts);

/* PNG, JPEG or BMP with 8-bit samples. Single-channel files are used as the
 * gray image directly. */
CEIQ_API ceiq_status ceiq_extract_file(const char* path,
                                       const ceiq_extract_options* opts,
                                       ceiq_features* out);

/* Interleaved row-major RGB, 3 * width * height bytes. */
CEIQ_API ceiq_status ceiq_extract_rgb(const uint8_t* rgb, int width, int height,
                                      const ceiq_extract_options* opts,
                                      ceiq_features* out);

CEIQ_API ceiq_status ceiq_extract_gray(const uint8_t* gray, int width,
                                       int height,
                                       const ceiq_extract_options* opts,
                                       ceiq_features* out);

/* Called once per failed image of a batch, in input order. */
typedef void (*ceiq_diagnostic_fn)(void* user, size_t index, const char* path,
                                   ceiq_status status, const char* message);

/* Extracts every path on `threads` workers. out[i] and ok[i] (1 or 0) are
 * filled per input; `cache_path` (may be NULL) names a CSV feature cache
 * keyed by file content that is read and updated. Returns CEIQ_OK even when
 * individual images fail; *n_ok counts the successes. */
CEIQ_API ceiq_status ceiq_extract_batch(const char* const* paths, size_t n,
                                        const ceiq_extract_options* opts,
                                        int threads, const char* cache_path,
                                        ceiq_features* out, int* ok,
                                        ceiq_diagnostic_fn on_failure,
                                        void* user, size_t* n_ok);

/* Wall-clock seconds; medians over repetitions. */
typedef struct ceiq_stage_timings {
  double decode;
  double decolorize;
  double equalize;
  double similarity;
  double entropy;
  double features_total; /* decolorize through entropy, excludes decode */
} ceiq_stage_timings;

CEIQ_API ceiq_status ceiq_bench_file(const char* path,
                                     const ceiq_extract_options* opts,
                                     int repetitions, ceiq_stage_timings* out,
                                     ceiq_features* features);

/* ------------------------------------------------------------------------ */
/* Regression model                                                         */

typedef struct ceiq_model ceiq_model;

typedef struct ceiq_svr_params {
  double c;         /* default 1 */
  double epsilon;   /* default 0.1 */
  uint64_t seed;    /* default 0 */
  int max_passes;   /* default 10000 */
  double tolerance; /* relative duality gap, default 1e-6 */
} ceiq_svr_params;

CEIQ_API void ceiq_svr_params_init(ceiq_svr_params* params);

CEIQ_API ceiq_status ceiq_model_train(const ceiq_features* features,
                                      const double* scores, size_t n,
                                      const ceiq_svr_params* params,
                                      ceiq_model** out);
CEIQ_API ceiq_status ceiq_model_predict(const ceiq_model* model,
                                        const ceiq_features* features,
                                        double* out);
/* weights[5] in feature order s_ge, e_g, e_e, e_ge, e_eg. */
CEIQ_API ceiq_status ceiq_model_parameters(const ceiq_model* model,
                                           double* weights, double* bias);
/* Appends a '#' metadata line. Mutates the model. */
CEIQ_API ceiq_status ceiq_model_add_comment(ceiq_model* model,
                                            const char* comment);
CEIQ_API ceiq_status ceiq_model_serialize(const ceiq_model* model, char** out);
CEIQ_API ceiq_status ceiq_model_deserialize(const char* text, ceiq_model** out);
CEIQ_API ceiq_status ceiq_model_save(const ceiq_model* model, const char* path);
CEIQ_API ceiq_status ceiq_model_load(const char* path, ceiq_model** out);
CEIQ_API void ceiq_model_free(ceiq_model* model);

/* ------------------------------------------------------------------------ */
/* Correlation criteria                                                     */

CEIQ_API ceiq_status ceiq_srocc(const double* x, const double* y, size_t n,
                                double* out);
CEIQ_API ceiq_status ceiq_krocc(const double* x, const double* y, size_t n,
                                double* out);
/* logistic_params is 5 or 4; params (may be NULL) receives that many
 * fitted coefficients. */
CEIQ_API ceiq_status ceiq_plcc_logistic(const double* objective,
                                        const double* subjective, size_t n,
                                        int logistic_params, double* plcc,
                                        double* params);

/* ------------------------------------------------------------------------ */
/* Datasets and evaluation                                                  */

typedef struct ceiq_dataset ceiq_dataset;

/* CSV manifest with header image_path,score,ref_id. Relative image paths
 * resolve against the manifest's directory. */
CEIQ_API ceiq_status ceiq_dataset_load(const char* manifest_path,
                                       ceiq_dataset** out);
CEIQ_API size_t ceiq_dataset_size(const ceiq_dataset* ds);
CEIQ_API const char* ceiq_dataset_name(const ceiq_dataset* ds);
CEIQ_API ceiq_polarity ceiq_dataset_polarity(const ceiq_dataset* ds);
/* Returned strings live as long as ds. */
CEIQ_API ceiq_status ceiq_dataset_entry(const ceiq_dataset* ds, size_t index,
                                        const char** image_path, double* score,
                                        const char** ref_id);
/* Extracts features for every entry (mutates ds). Fails on the first
 * unreadable or degenerate image, naming its path. */
CEIQ_API ceiq_status ceiq_dataset_compute_features(ceiq_dataset* ds,
                                                   const ceiq_extract_options* opts,
                                                   int threads,
                                                   const char* cache_path,
                                                   size_t* cache_hits);
CEIQ_API int ceiq_dataset_has_features(const ceiq_dataset* ds);
CEIQ_API ceiq_status ceiq_dataset_features(const ceiq_dataset* ds,
                                           size_t index, ceiq_features* out);
/* Trains on every entry. Requires features. */
CEIQ_API ceiq_status ceiq_dataset_train(const ceiq_dataset* ds,
                                        const ceiq_svr_params* params,
                                        ceiq_model** out);
/* in_train[i] = 1 when entry i lands on the training side. */
CEIQ_API ceiq_status ceiq_dataset_split(const ceiq_dataset* ds,
                                        double train_fraction, uint64_t seed,
                                        int* in_train);
CEIQ_API void ceiq_dataset_free(ceiq_dataset* ds);

typedef struct ceiq_protocol {
  double train_fraction; /* default 0.8 */
  int repetitions;       /* default 1000 */
  uint64_t base_seed;    /* default 0; repetition r uses base_seed + r */
  int logistic_params;   /* 5 (default) or 4 */
  int threads;           /* default 1; results do not depend on it */
} ceiq_protocol;

CEIQ_API void ceiq_protocol_init(ceiq_protocol* protocol);

typedef struct ceiq_report ceiq_report;

CEIQ_API ceiq_status ceiq_evaluate(const ceiq_dataset* ds,
                                   const ceiq_protocol* protocol,
                                   const ceiq_svr_params* params,
                                   ceiq_report** out);
CEIQ_API ceiq_status ceiq_report_medians(const ceiq_report* report,
                                         double* srocc, double* plcc,
                                         double* krocc, int* skipped);
CEIQ_API ceiq_status ceiq_report_json(const ceiq_report* report, char** out);
CEIQ_API ceiq_status ceiq_report_split_csv(const ceiq_report* report,
                                           char** out);
CEIQ_API void ceiq_report_free(ceiq_report* report);

/* Runs the protocol at each ratio; median_srocc[i] (may be NULL) and a CSV
 * table (may be NULL) are returned. */
CEIQ_API ceiq_status ceiq_split_ratio_sweep(const ceiq_dataset* ds,
                                            const double* ratios, size_t n,
                                            const ceiq_protocol* protocol,
                                            const ceiq_svr_params* params,
                                            double* median_srocc, char** csv);

typedef struct ceiq_cross_result {
  double srocc;
  double plcc;
  double krocc;
} ceiq_cross_result;

/* Trains on all of `train`, tests on all of `test`. Only the protocol's
 * logistic_params is used. json (may be NULL) receives the report. */
CEIQ_API ceiq_status ceiq_cross_database(const ceiq_dataset* train,
                                         const ceiq_dataset* test,
                                         const ceiq_protocol* protocol,
                                         const ceiq_svr_params* params,
                                         ceiq_cross_result* out, char** json);

/* ------------------------------------------------------------------------ */
/* Synthetic corpus                                                         */

typedef struct ceiq_synth_options {
  int references;  /* procedural scenes; default 20 */
  int width;       /* default 256 */
  int height;      /* default 256 */
  uint64_t seed;   /* default 1 */
  /* Optional scene files used instead of procedural references. */
  const char* const* reference_paths;
  size_t n_reference_paths;
} ceiq_synth_options;

CEIQ_API void ceiq_synth_options_init(ceiq_synth_options* opts);

/* Writes distorted PNGs and manifest.csv into dir; manifest_path (may be
 * NULL) receives the manifest location. */
CEIQ_API ceiq_status ceiq_synthesize_corpus(const char* dir,
                                            const ceiq_synth_options* opts,
                                            char** manifest_path);

#ifdef __cplusplus
}
#endif

#endif /* CEIQ_CEIQ_H_ */
