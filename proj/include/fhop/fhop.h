/* Copyright 2026 The fhop Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
/* C interface to the fhop frame-skipping library. */
#ifndef FHOP_FHOP_H_
#define FHOP_FHOP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FHOP_API __declspec(dllexport)
#else
#define FHOP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fhop_status {
  FHOP_OK = 0,
  FHOP_ERR_VALIDATION = 1,
  FHOP_ERR_IO = 2,
  FHOP_ERR_PARSE = 3,
  FHOP_ERR_GAP = 4,
  FHOP_ERR_DUPLICATE = 5,
  FHOP_ERR_DECODE = 6,
  FHOP_ERR_RANGE = 7,
  FHOP_ERR_DIMENSION = 8,
  FHOP_ERR_UNSUPPORTED_VERSION = 9,
  FHOP_ERR_CORRUPT = 10,
  FHOP_ERR_EMPTY = 11,
  FHOP_ERR_UNDERFLOW = 12,
  FHOP_ERR_INTERNAL = 99
} fhop_status;

typedef struct fhop_frames fhop_frames;
typedef struct fhop_log fhop_log;
typedef struct fhop_trace fhop_trace;
typedef struct fhop_agent fhop_agent;

/* Message of the last failed call on this thread; "" after success. */
FHOP_API const char* fhop_last_error(void);
FHOP_API const char* fhop_status_name(fhop_status status);
/* Process exit code for a status: 0 ok, 2 I/O-like, 1 otherwise. */
FHOP_API int fhop_exit_code(fhop_status status);
FHOP_API const char* fhop_version(void);
FHOP_API void fhop_string_free(char* s);

typedef void (*fhop_warning_fn)(const char* message, void* user);
/* Process-wide; NULL restores the default (stderr). */
FHOP_API void fhop_set_warning_handler(fhop_warning_fn fn, void* user);

enum { FHOP_VARIANT_CHUNK = 0, FHOP_VARIANT_WHOLE = 1, FHOP_VARIANT_DETECTION = 2 };
enum { FHOP_PAIRING_PROCESSED = 0, FHOP_PAIRING_CONSECUTIVE = 1 };
enum { FHOP_REWARD_MAX = 0, FHOP_REWARD_LANDED = 1, FHOP_REWARD_CUMULATIVE = 2 };
enum { FHOP_EXPLORE_SWEEP = 0, FHOP_EXPLORE_WALK = 1 };
enum { FHOP_ALPHA_CONSTANT = 0, FHOP_ALPHA_HARMONIC = 1 };
enum { FHOP_EPSILON_CONSTANT = 0, FHOP_EPSILON_LINEAR = 1 };

typedef struct fhop_state_config {
  int variant;
  int grid_rows;
  int grid_cols;
  int pixel_change_threshold;
  int k;
  int minibatch_size;
  double segment_seconds;
  double fps;
  double beta1;
  double beta2;
  int pairing;
} fhop_state_config;

typedef struct fhop_rl_config {
  double alpha;
  int alpha_schedule;
  double gamma;
  double psi1;
  double psi2;
  double theta;
  int k_max;
  int epochs;
  double epsilon;
  int epsilon_schedule;
  int exploration;
  int reward_mode;
  double iou_threshold;
} fhop_rl_config;

FHOP_API void fhop_state_config_default(fhop_state_config* cfg);
FHOP_API void fhop_rl_config_default(fhop_rl_config* cfg);

/* Frames. downscale 0 keeps the original size. */
FHOP_API fhop_status fhop_frames_load(const char* dir, int downscale, fhop_frames** out);
FHOP_API size_t fhop_frames_count(const fhop_frames* frames);
FHOP_API fhop_status fhop_frames_size(const fhop_frames* frames, int* width, int* height);
FHOP_API fhop_status fhop_frames_slice(const fhop_frames* frames, size_t begin, size_t end,
                                       fhop_frames** out);
FHOP_API void fhop_frames_free(fhop_frames* frames);

/* Detection logs (JSON Lines, one frame per line). */
FHOP_API fhop_status fhop_log_read(const char* path, fhop_log** out);
FHOP_API fhop_status fhop_log_parse(const char* text, fhop_log** out);
FHOP_API fhop_status fhop_log_write(const fhop_log* log, const char* path);
FHOP_API fhop_status fhop_log_format(const fhop_log* log, char** out);
FHOP_API size_t fhop_log_count(const fhop_log* log);
FHOP_API fhop_status fhop_log_detections(const fhop_log* log, size_t frame, size_t* count);
FHOP_API fhop_status fhop_log_slice(const fhop_log* log, size_t begin, size_t end, fhop_log** out);
FHOP_API void fhop_log_free(fhop_log* log);

FHOP_API fhop_status fhop_frame_distance(const fhop_log* log, size_t i, size_t j, double iou,
                                         double* out);
FHOP_API fhop_status fhop_skip_error(const fhop_log* log, size_t i, size_t k, double iou,
                                     double* out);

/* Synthetic scenes. n_frames 0 keeps the preset default. */
FHOP_API fhop_status fhop_synth_preset(const char* name, size_t n_frames, uint64_t seed,
                                       fhop_frames** frames, fhop_log** log);

/* Agents. frames may be NULL for the detection variant. */
FHOP_API fhop_status fhop_agent_train(const fhop_frames* frames, const fhop_log* log,
                                      const fhop_state_config* state, const fhop_rl_config* rl,
                                      uint64_t seed, fhop_agent** out);
FHOP_API fhop_status fhop_agent_save(const fhop_agent* agent, const char* path);
FHOP_API fhop_status fhop_agent_load(const char* path, fhop_agent** out);
FHOP_API fhop_status fhop_agent_shape(const fhop_agent* agent, size_t* states, size_t* actions);
FHOP_API fhop_status fhop_agent_run(const fhop_agent* agent, const fhop_frames* frames,
                                    const fhop_log* log, double iou, fhop_trace** out);
FHOP_API void fhop_agent_free(fhop_agent* agent);

/* Traces. */
FHOP_API fhop_status fhop_oracle_select(const fhop_log* log, double theta, int k_max, double iou,
                                        fhop_trace** out);
FHOP_API fhop_status fhop_fixed_skip(size_t n_frames, size_t k, fhop_trace** out);
FHOP_API fhop_status fhop_diff_baseline(const fhop_frames* frames, double tau, int k_max,
                                        const fhop_state_config* state, fhop_trace** out);
FHOP_API fhop_status fhop_trace_read(const char* path, fhop_trace** out);
FHOP_API fhop_status fhop_trace_write(const fhop_trace* trace, const char* path);
FHOP_API size_t fhop_trace_total_frames(const fhop_trace* trace);
FHOP_API size_t fhop_trace_processed_count(const fhop_trace* trace);
FHOP_API fhop_status fhop_trace_entry(const fhop_trace* trace, size_t i, size_t* processed_index,
                                      size_t* skip_length);
FHOP_API void fhop_trace_free(fhop_trace* trace);

typedef struct fhop_eval_report {
  double fraction_processed;
  double fraction_filtered;
  double error_per_skipped_frame;
  double achieved_f1;
  double achieved_f1_skipped;
  double count_accuracy;
  size_t frames_total;
  size_t frames_processed;
  int feasible; /* 1 / 0, or -1 when theta was not given */
} fhop_eval_report;

/* theta <= 0 skips the feasibility check. */
FHOP_API fhop_status fhop_evaluate(const fhop_trace* trace, const fhop_log* log, double iou,
                                   double theta, fhop_eval_report* out);

/* Oracle sweep over 0.10..0.50 step 0.05. */
FHOP_API fhop_status fhop_sweep_oracle(const fhop_log* log, int k_max, double iou,
                                       double* best_theta);

/* Runs one pipeline mode. config_path and overrides_json (a JSON merge patch)
   may be NULL. summary, when not NULL, receives a string to free with
   fhop_string_free. */
FHOP_API fhop_status fhop_run_pipeline(const char* mode, const char* config_path,
                                       const char* overrides_json, const char* out_dir,
                                       char** summary);

#ifdef __cplusplus
}
#endif

#endif /* FHOP_FHOP_H_ */
