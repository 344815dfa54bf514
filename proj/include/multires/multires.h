/* Copyright 2026 The multires Authors. All Rights Reserved.

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

/* C interface of libmultires: multi-resolution spectral front-end,
 * SE-residual countermeasure training, pruning and scoring.
 *
 * Every function returns an mr_status. On failure a one-line diagnostic is
 * available from mr_last_error() (thread-local, valid until the next call on
 * the same thread). Handles are opaque and owned by the caller; release them
 * with the matching *_free function. */

#ifndef MULTIRES_MULTIRES_H_
#define MULTIRES_MULTIRES_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MR_API __declspec(dllexport)
#else
#define MR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mr_status {
  MR_OK = 0,
  MR_ERR_INVALID_ARGUMENT = 1,
  MR_ERR_IO = 2,
  MR_ERR_FORMAT = 3,
  MR_ERR_SHAPE = 4,
  MR_ERR_NUMERICAL = 5,
  MR_ERR_CONFIG = 6,
  MR_ERR_STATE = 7,
  MR_ERR_INTERNAL = 99
} mr_status;

typedef struct mr_config mr_config;
typedef struct mr_checkpoint mr_checkpoint;

/* Receives progress and report text, one call per chunk. */
typedef void (*mr_log_fn)(const char* text, void* user);

MR_API const char* mr_version(void);
MR_API const char* mr_last_error(void);

/* ---- configuration ---------------------------------------------------- */

MR_API mr_status mr_config_default(mr_config** out);
MR_API mr_status mr_config_load(const char* path, mr_config** out);
MR_API void mr_config_free(mr_config* config);

/* key=value assignment using the config file keys. */
MR_API mr_status mr_config_set(mr_config* config, const char* key, const char* value);
/* Sets both corpus.seed and train.seed. */
MR_API mr_status mr_config_set_seed(mr_config* config, uint64_t seed);
MR_API mr_status mr_config_get_seed(const mr_config* config, uint64_t* out);
MR_API mr_status mr_config_validate(const mr_config* config);

/* String getters copy into buf (NUL terminated, truncated to cap) and report
 * the full length excluding the terminator in *needed. buf may be NULL when
 * cap is 0. */
MR_API mr_status mr_config_serialize(const mr_config* config, char* buf, size_t cap,
                                     size_t* needed);
MR_API mr_status mr_config_checkpoint_path(const mr_config* config, int refined,
                                           char* buf, size_t cap, size_t* needed);
MR_API mr_status mr_config_weights_split(const mr_config* config, char* buf, size_t cap,
                                         size_t* needed);

/* Route command output; NULL restores the default (stdout). */
MR_API mr_status mr_config_set_log(mr_config* config, mr_log_fn fn, void* user);

/* ---- pipeline commands ------------------------------------------------- */

MR_API mr_status mr_gen_data(const mr_config* config);
/* split: "train", "dev", "eval" or "all". */
MR_API mr_status mr_extract(const mr_config* config, const char* split);
MR_API mr_status mr_train(const mr_config* config);
/* cache may be NULL (the cache matching the checkpoint is used). eer and
 * min_tdcf may be NULL. */
MR_API mr_status mr_eval(const mr_config* config, const char* checkpoint, const char* split,
                         const char* cache, double* eer, double* min_tdcf);
MR_API mr_status mr_prune(const mr_config* config, const char* checkpoint,
                          size_t* retained_count);
MR_API mr_status mr_inspect_weights(const mr_config* config, const char* checkpoint,
                                    const char* split);

/* ---- checkpoints ------------------------------------------------------ */

MR_API mr_status mr_checkpoint_load(const char* path, mr_checkpoint** out);
MR_API void mr_checkpoint_free(mr_checkpoint* ckpt);
MR_API size_t mr_checkpoint_num_resolutions(const mr_checkpoint* ckpt);
MR_API size_t mr_checkpoint_num_params(const mr_checkpoint* ckpt);
MR_API mr_status mr_checkpoint_resolution(const mr_checkpoint* ckpt, size_t index,
                                          uint32_t* window, uint32_t* hop);
/* Scores a PCM16 mono WAV (logit(bonafide) - logit(spoof)) using the
 * alignment and duration settings of config. */
MR_API mr_status mr_checkpoint_score_wav(const mr_checkpoint* ckpt, const mr_config* config,
                                         const char* wav_path, double* score);

/* ---- metrics ---------------------------------------------------------- */

/* labels: 1 = bonafide, 0 = spoof. */
MR_API mr_status mr_eer(const double* scores, const int* labels, size_t n, double* out);
MR_API mr_status mr_min_tdcf(const double* scores, const int* labels, size_t n, double c1,
                             double c2, double* out);

#ifdef __cplusplus
}
#endif

#endif /* MULTIRES_MULTIRES_H_ */
