#ifndef JENSEN_GAP_H
#define JENSEN_GAP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JgStatus {
  JG_STATUS_OK = 0,
  JG_STATUS_NULL_ARGUMENT = 1,
  JG_STATUS_INVALID_UTF8 = 2,
  JG_STATUS_PARSE = 3,
  JG_STATUS_INVALID_INPUT = 4,
  JG_STATUS_SPECTRUM_OUT_OF_WINDOW = 5,
  JG_STATUS_OUTSIDE_DOMAIN = 6,
  JG_STATUS_INVALID_CONFIG = 7,
  JG_STATUS_INTERNAL = 8,
} JgStatus;

/**
 * Opaque instance: an element, a state, a convex function and a window,
 * plus the chain parameters.
 */
typedef struct JgInstance JgInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *jg_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *jg_version(void);

/**
 * Builds an instance from the JSON instance format used by `replay`.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum JgStatus jg_instance_from_json(const char *json, struct JgInstance **out);

/**
 * Builds an instance under the normalized trace from row-major real and
 * imaginary parts of a `dim x dim` matrix. `im` may be null for a real
 * matrix.
 *
 * # Safety
 * `re` (and `im` when not null) must point to `dim * dim` doubles,
 * `function` must be a nul-terminated selector and `out` a valid pointer.
 */
enum JgStatus jg_instance_new(size_t dim,
                              const double *re,
                              const double *im,
                              const char *function,
                              double m,
                              double big_m,
                              struct JgInstance **out);

/**
 * Releases an instance. Null is ignored.
 *
 * # Safety
 * `inst` must come from this library and not be used afterwards.
 */
void jg_instance_free(struct JgInstance *inst);

/**
 * Dimension of the instance's matrix, or 0 for null.
 *
 * # Safety
 * `inst` must be null or a live instance.
 */
size_t jg_instance_dim(const struct JgInstance *inst);

/**
 * Overrides the Taylor point used by the tangent chains.
 *
 * # Safety
 * `inst` must be a live instance.
 */
enum JgStatus jg_instance_set_taylor_point(struct JgInstance *inst, double t);

/**
 * Writes `psi(f(c)) - f(psi(c))`.
 *
 * # Safety
 * `inst` must be a live instance and `out` a valid pointer.
 */
enum JgStatus jg_instance_jensen_gap(const struct JgInstance *inst, double *out);

/**
 * Evaluates every chain. `chains_json` receives a JSON array to be freed
 * with [`jg_string_free`]; `violated` (may be null) receives the number
 * of violated chains.
 *
 * # Safety
 * `inst` must be a live instance and `chains_json` a valid pointer.
 */
enum JgStatus jg_instance_evaluate(const struct JgInstance *inst,
                                   char **chains_json,
                                   size_t *violated);

/**
 * Runs a campaign from a JSON configuration. `report_json` receives the
 * report, `violations` (may be null) the violation count.
 *
 * # Safety
 * `config_json` must be a nul-terminated string and `report_json` a valid
 * pointer.
 */
enum JgStatus jg_run_campaign(const char *config_json, char **report_json, uint64_t *violations);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void jg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JENSEN_GAP_H */
