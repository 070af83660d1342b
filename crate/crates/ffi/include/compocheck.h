#ifndef COMPOCHECK_H
#define COMPOCHECK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Input syntax for [`cc_model_load`].
 */
typedef enum CcFormat {
  CC_FORMAT_DSL = 0,
  CC_FORMAT_JSON = 1,
} CcFormat;

/**
 * Result of every call.
 */
typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_POINTER = 1,
  CC_STATUS_INVALID_UTF8 = 2,
  CC_STATUS_PARSE_ERROR = 3,
  CC_STATUS_INTEGRITY_ERROR = 4,
  CC_STATUS_INVALID_ARGUMENT = 5,
  CC_STATUS_SIMULATION_ERROR = 6,
  CC_STATUS_PANIC = 7,
} CcStatus;

/**
 * Opaque handle to a parsed, integrity-checked model.
 */
typedef struct CcModel CcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *cc_last_error(void);

/**
 * Library version as a static string.
 */
const char *cc_version(void);

/**
 * Parses `text`, validates integrity and synthesizes default delegation
 * associations. On success `*out` receives a handle to free with
 * [`cc_model_free`].
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CcStatus cc_model_load(const char *text, enum CcFormat format, struct CcModel **out);

/**
 * Releases a handle from [`cc_model_load`]. Null is ignored.
 *
 * # Safety
 * `model` must come from [`cc_model_load`] and not be used afterwards.
 */
void cc_model_free(struct CcModel *model);

/**
 * Runs the rules. `downgrade` is a comma-separated list of codes reported
 * as warnings, or null. `*out_json` receives the report; `*out_passed` is
 * set when no error remains.
 *
 * # Safety
 * `model` must be a live handle; the output pointers must be valid.
 */
enum CcStatus cc_check(const struct CcModel *model,
                       const char *downgrade,
                       char **out_json,
                       bool *out_passed);

/**
 * Instantiates `root` (or the model's declared root when null), injects the
 * default request suite and runs to quiescence. `*out_trace` receives the
 * trace as JSON lines; `*out_safe` is set when every request was delivered
 * to a receiver providing its interface.
 *
 * # Safety
 * `model` must be a live handle; `root` null or NUL-terminated; the output
 * pointers must be valid.
 */
enum CcStatus cc_simulate(const struct CcModel *model,
                          const char *root,
                          char **out_trace,
                          bool *out_safe);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMPOCHECK_H */
