/* Copyright 2026 The gvae Authors
 * License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
 *
 * C interface to the gvae speech enhancement library. Every function that
 * can fail returns a gvae_status; on failure gvae_last_error() holds a
 * one-line message for the calling thread. Strings handed out by the
 * library are released with gvae_string_free, sample buffers with
 * gvae_samples_free.
 */

#ifndef GVAE_GVAE_H_
#define GVAE_GVAE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GVAE_BUILDING_LIBRARY)
#define GVAE_API __declspec(dllexport)
#else
#define GVAE_API __declspec(dllimport)
#endif
#else
#define GVAE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gvae_status {
  GVAE_OK = 0,
  GVAE_ERR_INVALID_ARGUMENT = 1,
  GVAE_ERR_IO = 2,
  GVAE_ERR_FORMAT = 3,
  GVAE_ERR_CONFIG = 4,
  GVAE_ERR_NUMERIC = 5,
  GVAE_ERR_STATE = 6,
  GVAE_ERR_UNSUPPORTED = 7,
  GVAE_ERR_INTERNAL = 8
} gvae_status;

typedef enum gvae_split {
  GVAE_SPLIT_TRAIN = 0,
  GVAE_SPLIT_VALID = 1,
  GVAE_SPLIT_TEST = 2
} gvae_split;

typedef enum gvae_label_kind {
  GVAE_LABEL_VAD = 0,
  GVAE_LABEL_IBM = 1
} gvae_label_kind;

typedef struct gvae_config gvae_config;
typedef struct gvae_model gvae_model;

/* Progress lines from long-running commands. NULL disables logging. */
typedef void (*gvae_log_fn)(const char *line, void *user);

GVAE_API const char *gvae_version(void);
GVAE_API const char *gvae_status_name(gvae_status status);
GVAE_API const char *gvae_last_error(void);
GVAE_API void gvae_set_log(gvae_log_fn fn, void *user);
GVAE_API void gvae_string_free(char *s);
GVAE_API void gvae_samples_free(double *samples);

/* ---- configuration ---------------------------------------------------- */

GVAE_API gvae_status gvae_config_create(gvae_config **out);
/* path NULL or "" falls back to $GVAE_CONFIG, then to the defaults. */
GVAE_API gvae_status gvae_config_load(const char *path, gvae_config **out);
GVAE_API gvae_status gvae_config_set(gvae_config *cfg, const char *key,
                                     const char *value);
GVAE_API gvae_status gvae_config_get(const gvae_config *cfg, const char *key,
                                     char **value);
GVAE_API gvae_status gvae_config_validate(const gvae_config *cfg);
GVAE_API gvae_status gvae_config_format(const gvae_config *cfg, char **text);
/* 16 hex digits plus terminator. */
GVAE_API gvae_status gvae_config_hash(const gvae_config *cfg, char out[17]);
GVAE_API void gvae_config_destroy(gvae_config *cfg);

/* ---- commands ---------------------------------------------------------- */

typedef struct gvae_source_options {
  double train_minutes;
  double valid_minutes;
  int test_utterances;
  int speakers_train;
  int speakers_valid;
  int speakers_test;
  double min_seconds;
  double max_seconds;
  double noise_seconds;
  int noise_instances;
  uint64_t seed;
} gvae_source_options;

GVAE_API void gvae_source_options_default(gvae_source_options *opts);
/* Procedural speech and noise sources plus a manifest (sources.tsv). */
GVAE_API gvae_status gvae_gen_sources(const gvae_config *cfg,
                                      const gvae_source_options *opts,
                                      const char *out_dir);
GVAE_API gvae_status gvae_synth_data(const gvae_config *cfg);
GVAE_API gvae_status gvae_build_vae(const gvae_config *cfg);
GVAE_API gvae_status gvae_train_vae(const gvae_config *cfg);
GVAE_API gvae_status gvae_train_classifier(const gvae_config *cfg,
                                           gvae_label_kind kind);
GVAE_API gvae_status gvae_train_supervised(const gvae_config *cfg);
/* trace_path may be NULL. */
GVAE_API gvae_status gvae_enhance_file(const gvae_config *cfg,
                                       const char *input_wav,
                                       const char *output_wav,
                                       const char *trace_path);
GVAE_API gvae_status gvae_enhance_corpus(const gvae_config *cfg,
                                         gvae_split split);
/* systems: "mixture", "supervised=CKPT", "vae=CKPT[,BACKEND[,CLF_CKPT]]".
 * n_systems 0 selects the systems implied by the config. Either output
 * pointer may be NULL. */
GVAE_API gvae_status gvae_evaluate(const gvae_config *cfg,
                                   const char *const *systems,
                                   size_t n_systems, gvae_split split,
                                   char **report_tsv, char **report_text);

/* ---- checkpoints -------------------------------------------------------- */

GVAE_API gvae_status gvae_model_load(const char *path, gvae_model **out);
GVAE_API gvae_status gvae_model_parameter_count(const gvae_model *model,
                                                uint64_t *count);
/* "params=N" followed by header and layout lines. */
GVAE_API gvae_status gvae_model_describe(const gvae_model *model,
                                         char **text);
GVAE_API void gvae_model_destroy(gvae_model *model);

/* ---- primitives --------------------------------------------------------- */

GVAE_API gvae_status gvae_si_sdr(const double *estimate,
                                 const double *reference, size_t n,
                                 double *out_db);
GVAE_API gvae_status gvae_wav_read(const char *path, double **samples,
                                   size_t *n, int *sample_rate);
GVAE_API gvae_status gvae_wav_write(const char *path, const double *samples,
                                    size_t n, int sample_rate);

#ifdef __cplusplus
}
#endif

#endif /* GVAE_GVAE_H_ */
