/*
 * Copyright 2026 The goaldirector Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* goaldirector C API.
 *
 * Every call returns a gdir_status. On failure, gdir_last_error() returns a
 * message for the calling thread that stays valid until the next call on
 * that thread. Strings handed out through char** must be released with
 * gdir_string_free. Handles are not thread-safe; use one per thread or lock.
 */
#ifndef GDIR_GDIR_H
#define GDIR_GDIR_H

#include <stddef.h>
#include <stdint.h>

#if defined(GDIR_BUILDING_LIBRARY)
#define GDIR_API __attribute__((visibility("default")))
#else
#define GDIR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gdir_status {
  GDIR_OK = 0,
  GDIR_ERR_INVALID_ARGUMENT = 1,
  GDIR_ERR_IO = 2,
  GDIR_ERR_PARSE = 3,
  GDIR_ERR_VALIDATION = 4,
  GDIR_ERR_CONFIG = 5,
  GDIR_ERR_BACKEND = 6,
  GDIR_ERR_AUTH = 7,
  GDIR_ERR_DIVERGED = 8,
  GDIR_ERR_NOT_FOUND = 9,
  GDIR_ERR_INTERNAL = 10
} gdir_status;

typedef struct gdir_config gdir_config;

typedef struct gdir_run_result {
  int tasks;
  int failed;
} gdir_run_result;

typedef struct gdir_train_result {
  int epochs_run;
  double iterations_before;
  double iterations_after;
  double reward_before;
  double reward_after;
} gdir_train_result;

typedef void (*gdir_epoch_callback)(int epoch, double mean_reward, double mean_iterations, double kl,
                                    void* user);

GDIR_API const char* gdir_version(void);
GDIR_API const char* gdir_last_error(void);
GDIR_API const char* gdir_status_name(gdir_status status);
GDIR_API void gdir_string_free(char* s);

/* path may be NULL for built-in defaults. */
GDIR_API gdir_status gdir_config_load(const char* path, gdir_config** out);
/* Overrides one key ("run.seed", "sim.p_success", ...) and re-validates. */
GDIR_API gdir_status gdir_config_set(gdir_config* cfg, const char* key, const char* value);
GDIR_API gdir_status gdir_config_get_path(const gdir_config* cfg, const char* which, char** out);
GDIR_API gdir_status gdir_config_hash(const gdir_config* cfg, char** out);
GDIR_API gdir_status gdir_config_canonical(const gdir_config* cfg, char** out);
GDIR_API void gdir_config_free(gdir_config* cfg);

/* policy_path may be NULL. Task failures are counted in out->failed. */
GDIR_API gdir_status gdir_run_suite(const gdir_config* cfg, const char* suite_dir, const char* out_dir,
                                    unsigned jobs, const char* policy_path, gdir_run_result* out);

/* Writes report.json into out_dir. report_json / table may be NULL. */
GDIR_API gdir_status gdir_eval(const gdir_config* cfg, const char* out_dir, char** report_json, char** table);

GDIR_API gdir_status gdir_report_render(const char* report_path, char** table);

/* resume_path may be NULL; callback may be NULL. */
GDIR_API gdir_status gdir_train(const gdir_config* cfg, const char* suite_dir, const char* out_dir,
                                unsigned jobs, const char* resume_path, gdir_epoch_callback callback,
                                void* user, gdir_train_result* out);

/* mix is "t2i", "i2i" or "mixed". */
GDIR_API gdir_status gdir_generate_suite(const char* dir, unsigned count, unsigned min_goals, unsigned max_goals,
                                         const char* mix, uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif /* GDIR_GDIR_H */
