#ifndef ERMLR_H
#define ERMLR_H

/* Generated by cbindgen. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ErmlrStatus {
  ERMLR_STATUS_OK = 0,
  ERMLR_STATUS_NULL_POINTER = 1,
  ERMLR_STATUS_INVALID_ARGUMENT = 2,
  ERMLR_STATUS_DIMENSION_MISMATCH = 3,
  ERMLR_STATUS_IO = 4,
  ERMLR_STATUS_PARSE = 5,
  ERMLR_STATUS_DEGENERATE_WEIGHTS = 6,
  ERMLR_STATUS_UNSTABLE_ADJACENCY = 7,
  ERMLR_STATUS_BUFFER_TOO_SMALL = 8,
  ERMLR_STATUS_INTERNAL = 99,
} ErmlrStatus;

/**
 * Trained classifier.
 */
typedef struct ErmlrModel ErmlrModel;

/**
 * Event path under construction or parsed from JSON.
 */
typedef struct ErmlrPath ErmlrPath;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *ermlr_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ermlr_version(void);

/**
 * Parses a model from its JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ErmlrStatus ermlr_model_from_json(const char *json, struct ErmlrModel **out);

/**
 * Loads a model JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ErmlrStatus ermlr_model_load(const char *path, struct ErmlrModel **out);

/**
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void ermlr_model_free(struct ErmlrModel *model);

/**
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum ErmlrStatus ermlr_model_num_classes(const struct ErmlrModel *model, size_t *out);

/**
 * # Safety
 * `model` and `out` must be valid pointers.
 */
enum ErmlrStatus ermlr_model_dim(const struct ErmlrModel *model, size_t *out);

/**
 * Creates an empty path with `dim` components on `(0, horizon]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ErmlrStatus ermlr_path_new(size_t dim, double horizon, struct ErmlrPath **out);

/**
 * Appends an event at `time` to the 0-based `component`. Events may arrive
 * in any order; duplicates within a component are rejected when the path
 * is used.
 *
 * # Safety
 * `path` must be a valid handle.
 */
enum ErmlrStatus ermlr_path_push(struct ErmlrPath *path, size_t component, double time);

/**
 * Parses a path from JSON `{"T": ..., "events": [[...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ErmlrStatus ermlr_path_from_json(const char *json, struct ErmlrPath **out);

/**
 * # Safety
 * `path` must come from this library and not be used afterwards.
 */
void ermlr_path_free(struct ErmlrPath *path);

/**
 * # Safety
 * `path` and `out` must be valid pointers.
 */
enum ErmlrStatus ermlr_path_total_events(const struct ErmlrPath *path, size_t *out);

/**
 * Number of events in the 0-based `component`, or the times themselves when
 * `times` is non-null and `capacity` is large enough.
 *
 * # Safety
 * `path` and `count` must be valid; `times` may be null or point to
 * `capacity` writable doubles.
 */
enum ErmlrStatus ermlr_path_events(const struct ErmlrPath *path,
                                   size_t component,
                                   double *times,
                                   size_t capacity,
                                   size_t *count);

/**
 * Writes the class posterior of `path` into `probs[0..len]`; `len` must equal
 * the number of classes.
 *
 * # Safety
 * `model`, `path` must be valid handles and `probs` must hold `len` doubles.
 */
enum ErmlrStatus ermlr_model_posterior(const struct ErmlrModel *model,
                                       const struct ErmlrPath *path,
                                       double *probs,
                                       size_t len);

/**
 * Predicted 1-based label of `path`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum ErmlrStatus ermlr_model_predict(const struct ErmlrModel *model,
                                     const struct ErmlrPath *path,
                                     size_t *label);

/**
 * Log-density of `path` under baselines `mu[dim]`, row-major adjacency
 * `a[dim*dim]` and kernel rate `beta`. `clamped` (optional) reports whether
 * an intensity hit the log floor.
 *
 * # Safety
 * Array pointers must hold the stated number of doubles; `path` and `out`
 * must be valid; `clamped` may be null.
 */
enum ErmlrStatus ermlr_log_density(const double *mu,
                                   const double *a,
                                   size_t dim,
                                   double beta,
                                   const struct ErmlrPath *path,
                                   double *out,
                                   bool *clamped);

/**
 * Draws one path on `(0, horizon]` from a stable nonnegative model. The
 * same `(seed, index)` pair always yields the same path.
 *
 * # Safety
 * Array pointers must hold the stated number of doubles and `out` must be
 * valid.
 */
enum ErmlrStatus ermlr_simulate(const double *mu,
                                const double *a,
                                size_t dim,
                                double beta,
                                double horizon,
                                uint64_t seed,
                                uint64_t index,
                                struct ErmlrPath **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERMLR_H */
