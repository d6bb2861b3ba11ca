// Copyright 2026 The TRR-SNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface of the TRR-SNN engine. All functions return a status code;
 * on failure trr_last_error() describes the problem. Handles are opaque and
 * owned by the caller, who releases them with the matching destroy call. */
#ifndef TRR_TRR_H_
#define TRR_TRR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TRR_API __declspec(dllexport)
#else
#define TRR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trr_status {
  TRR_OK = 0,
  TRR_ERR_INVALID_ARGUMENT = 1,
  TRR_ERR_DIMENSION = 2,
  TRR_ERR_CONTRACT = 3,
  TRR_ERR_PARSE = 4,
  TRR_ERR_DATA = 5,
  TRR_ERR_IO = 6,
  TRR_ERR_CHECKPOINT = 7,
  TRR_ERR_NUMERIC = 8,
  TRR_ERR_CONFIG = 9,
  TRR_ERR_INTERNAL = 10
} trr_status;

enum { TRR_NUM_STAGES = 4 };

typedef enum trr_integration {
  TRR_FIXED_COUNT = 0,
  TRR_FIXED_DURATION = 1
} trr_integration;

typedef struct trr_config trr_config;
typedef struct trr_data trr_data; /* a train/test split */
typedef struct trr_model trr_model;

typedef struct trr_eval_result {
  double accuracy;
  double asfr[TRR_NUM_STAGES];
  uint64_t spike_counts[TRR_NUM_STAGES];
  uint64_t elements[TRR_NUM_STAGES];
  size_t samples;
} trr_eval_result;

typedef struct trr_train_summary {
  size_t epochs;
  size_t iterations;
  double final_train_loss; /* mean total loss of the last epoch */
  double test_accuracy;
  double asfr[TRR_NUM_STAGES];
  double wall_seconds;
} trr_train_summary;

typedef struct trr_ablation_row {
  char label[16];
  double mean_accuracy;     /* in [0,1] */
  double delta_vs_baseline; /* accuracy points */
  double asfr[TRR_NUM_STAGES];
} trr_ablation_row;

/* Message of the last failure on the calling thread ("" if none). */
TRR_API const char* trr_last_error(void);
TRR_API const char* trr_status_name(trr_status status);
TRR_API const char* trr_version(void);

/* Configuration: defaults, file loading, key=value access. */
TRR_API trr_status trr_config_create(trr_config** out);
TRR_API trr_status trr_config_load(const char* path, trr_config** out);
TRR_API trr_status trr_config_set(trr_config* config, const char* key, const char* value);
/* "key=value" or "section.key=value". */
TRR_API trr_status trr_config_apply(trr_config* config, const char* assignment);
/* Copies the value and its terminator into buf when it fits; *needed always
 * receives the required size including the terminator. */
TRR_API trr_status trr_config_get(const trr_config* config, const char* key, char* buf,
                                  size_t buf_size, size_t* needed);
TRR_API trr_status trr_config_save(const trr_config* config, const char* path);
TRR_API void trr_config_destroy(trr_config* config);

/* Generates or loads the data the config names. */
TRR_API trr_status trr_data_prepare(const trr_config* config, trr_data** out);
TRR_API trr_status trr_data_save(const trr_data* data, const char* train_path,
                                 const char* test_path);
TRR_API trr_status trr_data_size(const trr_data* data, size_t* train, size_t* test);
TRR_API void trr_data_destroy(trr_data* data);

/* Rewrites an event file in the format its extension names (.csv or binary). */
TRR_API trr_status trr_events_convert(const char* input_path, const char* output_path);
/* Integrates each event file into frames and writes a labelled dataset file. */
TRR_API trr_status trr_events_to_dataset(const char* const* paths, const int32_t* labels,
                                         size_t count, size_t timesteps,
                                         trr_integration policy, size_t downsample,
                                         size_t classes, const char* output_path);

/* A model for the config's architecture sized to the data, calibrated on
 * the first training samples. */
TRR_API trr_status trr_model_create(const trr_config* config, const trr_data* data,
                                    uint64_t seed, trr_model** out);
/* Builds the configured model, then loads weights; any mismatch fails with
 * TRR_ERR_CHECKPOINT. */
TRR_API trr_status trr_model_load(const trr_config* config, const trr_data* data,
                                  const char* checkpoint_path, trr_model** out);
TRR_API trr_status trr_model_save(const trr_model* model, const char* path);
TRR_API void trr_model_destroy(trr_model* model);

/* Trains in place; output_dir may be NULL to skip logs and checkpoint. */
TRR_API trr_status trr_train(const trr_config* config, const trr_data* data,
                             trr_model* model, const char* output_dir,
                             trr_train_summary* out);
/* Evaluates on the test split. */
TRR_API trr_status trr_evaluate(const trr_model* model, const trr_data* data,
                                trr_eval_result* out);
/* Test-split predictions; at most `capacity` are copied and *count receives
 * the number of samples. */
TRR_API trr_status trr_predict(const trr_model* model, const trr_data* data,
                               int32_t* predictions, size_t capacity, size_t* count);
/* Per-stage ASFR over the test split, also written as CSV when csv_path is
 * not NULL. */
TRR_API trr_status trr_asfr_report(const trr_model* model, const trr_data* data,
                                   const char* csv_path, double asfr[TRR_NUM_STAGES]);
/* Baseline, +TR, +FH and TRR over the config's ablation seeds; writes
 * ablation.csv and asfr.csv into output_dir when it is not NULL. */
TRR_API trr_status trr_ablate(const trr_config* config, const trr_data* data,
                              const char* output_dir, trr_ablation_row rows[4]);

#ifdef __cplusplus
}
#endif

#endif /* TRR_TRR_H_ */
