#ifndef CANONFRAME_H
#define CANONFRAME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_NULL_POINTER = 1,
  /**
   * Malformed problem or unusable input (CLI exit code 2).
   */
  CF_STATUS_INPUT = 2,
  /**
   * An identity that must hold failed (CLI exit code 3).
   */
  CF_STATUS_CONSISTENCY = 3,
  CF_STATUS_INVALID_UTF8 = 4,
  CF_STATUS_PANIC = 5,
} CfStatus;

/**
 * Opaque analysis result.
 */
typedef struct CfAnalysis CfAnalysis;

/**
 * Opaque parsed problem.
 */
typedef struct CfProblem CfProblem;

/**
 * Verdicts of an analysis, as 0/1.
 */
typedef struct CfVerdicts {
  int32_t wunschmann;
  int32_t equation_type;
  int32_t flat;
} CfVerdicts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call on the same thread.
 */
const char *cf_last_error(void);

/**
 * Parses problem text (`key = value` lines).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CfStatus cf_problem_parse(const char *text, struct CfProblem **out);

/**
 * # Safety
 * `p` must come from `cf_problem_parse` and not be used afterwards.
 */
void cf_problem_free(struct CfProblem *p);

/**
 * Runs the full pipeline.
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum CfStatus cf_analyze(const struct CfProblem *p, struct CfAnalysis **out);

/**
 * # Safety
 * `a` must come from `cf_analyze` and not be used afterwards.
 */
void cf_analysis_free(struct CfAnalysis *a);

/**
 * # Safety
 * `a` must be a live analysis handle and `out` a valid pointer.
 */
enum CfStatus cf_analysis_verdicts(const struct CfAnalysis *a, struct CfVerdicts *out);

/**
 * The text report; free it with `cf_string_free`.
 *
 * # Safety
 * `a` must be a live analysis handle and `out` a valid pointer.
 */
enum CfStatus cf_analysis_report(const struct CfAnalysis *a, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cf_string_free(char *s);

/**
 * Runs every identity check. `passed` receives 1 if all hold; failing
 * checks do not make the call itself fail.
 *
 * # Safety
 * `p` must be a live problem handle and `passed` a valid pointer.
 */
enum CfStatus cf_verify(const struct CfProblem *p, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CANONFRAME_H */
