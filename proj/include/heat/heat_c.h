// Copyright 2026 The HEAT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the HEAT entity-alignment library.
 *
 * Objects are opaque handles created by *_load / *_run functions and released
 * with the matching *_free. Every fallible call returns a heat_status; on
 * failure heat_last_error() describes the problem for the calling thread.
 */
#ifndef HEAT_HEAT_C_H_
#define HEAT_HEAT_C_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HEAT_API __declspec(dllexport)
#else
#define HEAT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum heat_status {
  HEAT_OK = 0,
  HEAT_ERR_NOT_FOUND = 1,
  HEAT_ERR_INTEGRITY = 2,
  HEAT_ERR_DUPLICATE = 3,
  HEAT_ERR_DANGLING_HUB = 4,
  HEAT_ERR_PARSE = 5,
  HEAT_ERR_CONFIG = 6,
  HEAT_ERR_IO = 7,
  HEAT_ERR_INVALID_ARGUMENT = 8,
  HEAT_ERR_INVARIANT = 9,
  HEAT_ERR_INTERNAL = 10
} heat_status;

typedef struct heat_graph heat_graph;
typedef struct heat_pipeline heat_pipeline;
typedef struct heat_matrix heat_matrix;
typedef struct heat_unified heat_unified;
typedef struct heat_truth heat_truth;
typedef struct heat_merge_log heat_merge_log;
typedef struct heat_report heat_report;
typedef struct heat_synth_spec heat_synth_spec;

typedef struct heat_eval_point {
  double threshold;
  double precision;
  double recall;
  int64_t n_predicted;
  int64_t n_correct;
  int precision_defined;
} heat_eval_point;

typedef struct heat_matrix_summary {
  size_t rows;
  size_t unalignable_rows;
  size_t candidates;        /* real candidate entries over all rows */
  size_t merge_candidates;  /* rows whose argmax real candidate exceeds tau */
} heat_matrix_summary;

HEAT_API const char *heat_version(void);
HEAT_API const char *heat_status_name(heat_status status);
/* Message of the last failed call on this thread; "" when none. */
HEAT_API const char *heat_last_error(void);

/* Fact graphs (line-delimited JSON records). */
HEAT_API heat_status heat_graph_load(const char *path, heat_graph **out);
HEAT_API heat_status heat_graph_save(const heat_graph *graph, const char *path);
HEAT_API heat_status heat_graph_counts(const heat_graph *graph, size_t *entities,
                                       size_t *events, size_t *facts);
HEAT_API void heat_graph_free(heat_graph *graph);

/* Pipeline configuration (JSON, {"stages": [...]}). */
HEAT_API heat_status heat_pipeline_load(const char *path, heat_pipeline **out);
HEAT_API size_t heat_pipeline_stage_count(const heat_pipeline *pipeline);
/* NULL when index is out of range. */
HEAT_API const char *heat_pipeline_stage_name(const heat_pipeline *pipeline,
                                              size_t index);
HEAT_API heat_status heat_pipeline_stage_tau(const heat_pipeline *pipeline,
                                             const char *stage_name, double *tau);
HEAT_API void heat_pipeline_free(heat_pipeline *pipeline);

/* Single EAT pass of the named stage; graph_b is the reference graph. */
HEAT_API heat_status heat_align(const heat_graph *graph_a,
                                const heat_graph *graph_b,
                                const heat_pipeline *pipeline,
                                const char *stage_name, heat_matrix **out);
HEAT_API heat_status heat_matrix_save(const heat_matrix *matrix, const char *path);
HEAT_API heat_status heat_matrix_load(const char *path, heat_matrix **out);
HEAT_API heat_status heat_matrix_summarize(const heat_matrix *matrix, double tau,
                                           heat_matrix_summary *out);
HEAT_API void heat_matrix_free(heat_matrix *matrix);

/* Full staged pipeline. */
HEAT_API heat_status heat_run(const heat_graph *graph_a, const heat_graph *graph_b,
                              const heat_pipeline *pipeline, heat_unified **out);
HEAT_API heat_status heat_unified_save_graph(const heat_unified *unified,
                                             const char *path);
HEAT_API heat_status heat_unified_save_log(const heat_unified *unified,
                                           const char *path);
HEAT_API size_t heat_unified_merge_count(const heat_unified *unified);
HEAT_API heat_status heat_unified_counts(const heat_unified *unified,
                                         size_t *entities, size_t *events,
                                         size_t *facts);
HEAT_API void heat_unified_free(heat_unified *unified);

/* Ground truth (post_id TAB pre_id) and merge logs. */
HEAT_API heat_status heat_truth_load(const char *path, heat_truth **out);
HEAT_API size_t heat_truth_size(const heat_truth *truth);
HEAT_API void heat_truth_free(heat_truth *truth);
HEAT_API heat_status heat_merge_log_load(const char *path, heat_merge_log **out);
HEAT_API void heat_merge_log_free(heat_merge_log *log);

/* Precision/recall. thresholds may be NULL (count 0) for 0.05..0.95. */
HEAT_API heat_status heat_eval_matrix(const heat_matrix *matrix,
                                      const heat_truth *truth,
                                      const double *thresholds, size_t count,
                                      heat_report **out);
HEAT_API heat_status heat_eval_log(const heat_merge_log *log,
                                   const heat_truth *truth,
                                   const double *thresholds, size_t count,
                                   heat_report **out);
HEAT_API size_t heat_report_size(const heat_report *report);
HEAT_API heat_status heat_report_point(const heat_report *report, size_t index,
                                       heat_eval_point *out);
HEAT_API heat_status heat_report_save_csv(const heat_report *report,
                                          const char *path);
HEAT_API void heat_report_free(heat_report *report);

/* Synthetic data. */
HEAT_API heat_status heat_synth_spec_load(const char *path, heat_synth_spec **out);
HEAT_API heat_status heat_synth_spec_set_seed(heat_synth_spec *spec, uint64_t seed);
/* Writes <prefix>_pre.jsonl, <prefix>_post.jsonl and <prefix>_truth.tsv. */
HEAT_API heat_status heat_synth_generate(const heat_synth_spec *spec,
                                         const char *out_prefix);
HEAT_API void heat_synth_spec_free(heat_synth_spec *spec);

#ifdef __cplusplus
}
#endif

#endif /* HEAT_HEAT_C_H_ */
