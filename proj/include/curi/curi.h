// Copyright 2026 The CURI Authors.
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

#ifndef CURI_CURI_H_
#define CURI_CURI_H_

/* C interface to the CURI benchmark generator.
 *
 * Every function that can fail returns a curi_status. On failure a
 * description is available from curi_last_error() on the calling thread.
 * Strings returned through `char**` belong to the caller and are released
 * with curi_string_free(). Handles are released with their *_destroy or
 * *_close function; passing NULL to those is a no-op. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CURI_BUILDING_LIBRARY)
#define CURI_API __declspec(dllexport)
#else
#define CURI_API __declspec(dllimport)
#endif
#else
#define CURI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum curi_status {
  CURI_OK = 0,
  CURI_ERR_UNKNOWN_TOKEN = 1,
  CURI_ERR_STACK_UNDERFLOW = 2,
  CURI_ERR_TYPE_MISMATCH = 3,
  CURI_ERR_TRAILING_OPERANDS = 4,
  CURI_ERR_INVALID_CONFIG = 5,
  CURI_ERR_INFEASIBLE_RANGE = 6,
  CURI_ERR_EMPTY_POOL = 7,
  CURI_ERR_EMPTY_SPACE = 8,
  CURI_ERR_DEGENERATE_SPLIT = 9,
  CURI_ERR_INSUFFICIENT_POSITIVES = 10,
  CURI_ERR_INSUFFICIENT_SCENES = 11,
  CURI_ERR_EMPTY_HYPOTHESIS_SET = 12,
  CURI_ERR_SINGLE_CLASS = 13,
  CURI_ERR_NO_POSITIVES = 14,
  CURI_ERR_MISMATCHED_EPISODES = 15,
  CURI_ERR_IO = 16,
  CURI_ERR_DIGEST_MISMATCH = 17,
  CURI_ERR_MISSING_ARTIFACT = 18,
  CURI_ERR_INVALID_ARGUMENT = 19,
  CURI_ERR_INTERNAL = 100
} curi_status;

CURI_API const char* curi_version(void);
CURI_API const char* curi_status_name(curi_status status);
/* Message of the last failure on this thread, or "" after a success. */
CURI_API const char* curi_last_error(void);
CURI_API void curi_string_free(char* s);

/* ---- Run configuration ------------------------------------------------ */

typedef struct curi_config curi_config;

/* Defaults: 50000 raw concepts, 100000 scenes, 2000/200/500 episodes. */
CURI_API curi_status curi_config_create(curi_config** out);
/* Flat `key = value` file; see README for the keys. */
CURI_API curi_status curi_config_load(const char* path, curi_config** out);
CURI_API curi_status curi_config_set(curi_config* config, const char* key,
                                     const char* value);
CURI_API curi_status curi_config_to_json(const curi_config* config, char** out);
CURI_API void curi_config_destroy(curi_config* config);

/* ---- Pipeline stages -------------------------------------------------- */

typedef struct curi_pipeline curi_pipeline;

/* Opens (or resumes) the output directory named by the config. */
CURI_API curi_status curi_pipeline_open(const curi_config* config, curi_pipeline** out);
CURI_API void curi_pipeline_close(curi_pipeline* pipeline);

CURI_API curi_status curi_cmd_sample_concepts(curi_pipeline* p);
CURI_API curi_status curi_cmd_build_pool(curi_pipeline* p);
CURI_API curi_status curi_cmd_filter(curi_pipeline* p);
/* kind: instance_iid, concept_iid, counting, extrinsic, intrinsic, boolean,
 * complexity, binding_color, binding_shape. */
CURI_API curi_status curi_cmd_split(curi_pipeline* p, const char* kind);
/* mode: "hard", "easy", or NULL for the configured `negatives`. */
CURI_API curi_status curi_cmd_episodes(curi_pipeline* p, const char* kind,
                                       const char* mode);
/* Any of the out pointers may be NULL. */
CURI_API curi_status curi_cmd_compgap(curi_pipeline* p, const char* kind,
                                      const char* mode, double* gap_map,
                                      double* gap_cba, char** report_json);
CURI_API curi_status curi_cmd_all(curi_pipeline* p, char** summary_json);
/* 1 if the last run of `stage` (a manifest stage name) was served from
 * cache. */
CURI_API curi_status curi_pipeline_stage_skipped(const curi_pipeline* p,
                                                 const char* stage, int* out);
CURI_API curi_status curi_pipeline_out_dir(const curi_pipeline* p, char** out);

/* ---- Concepts ---------------------------------------------------------- */

typedef struct curi_concept curi_concept;

/* Space-separated postfix tokens, e.g. "x color? blue = exists=". */
CURI_API curi_status curi_concept_parse(const char* postfix, curi_concept** out);
/* Draw `index` of the default grammar under `seed`; max_depth <= 0 keeps the
 * default depth bound. */
CURI_API curi_status curi_concept_sample(uint64_t seed, uint64_t index, int max_depth,
                                         curi_concept** out);
CURI_API void curi_concept_destroy(curi_concept* c);
CURI_API curi_status curi_concept_serialize(const curi_concept* c, char** out);
CURI_API curi_status curi_concept_pretty(const curi_concept* c, char** out);
CURI_API int curi_concept_length(const curi_concept* c);

/* ---- Scene pools -------------------------------------------------------- */

typedef struct curi_pool curi_pool;

CURI_API curi_status curi_pool_build(uint64_t n, uint64_t seed, curi_pool** out);
CURI_API void curi_pool_destroy(curi_pool* pool);
CURI_API uint64_t curi_pool_size(const curi_pool* pool);
CURI_API curi_status curi_pool_scene_json(const curi_pool* pool, uint64_t scene,
                                          char** out);
CURI_API curi_status curi_concept_evaluate(const curi_concept* c, const curi_pool* pool,
                                           uint64_t scene, int* out);
/* True count over the pool and the hex signature hash. */
CURI_API curi_status curi_concept_signature(const curi_concept* c, const curi_pool* pool,
                                            uint64_t* true_count, char** hash_hex);

/* ---- Metrics -------------------------------------------------------------- */

/* labels are 0/1; ids break score ties (ascending) and may be NULL, in
 * which case the item index is used. */
CURI_API curi_status curi_average_precision(const double* scores, const uint8_t* labels,
                                            const uint64_t* ids, size_t n, double* out);
/* A score is a positive prediction iff it is strictly above threshold. */
CURI_API curi_status curi_class_balanced_accuracy(const double* scores,
                                                  const uint8_t* labels, size_t n,
                                                  double threshold, double* out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* CURI_CURI_H_ */
