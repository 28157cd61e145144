#ifndef CENCON_H
#define CENCON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum CenconStatus {
  CENCON_STATUS_OK = 0,
  CENCON_STATUS_NULL_ARGUMENT = 1,
  CENCON_STATUS_INVALID_UTF8 = 2,
  CENCON_STATUS_PARSE_ERROR = 3,
  CENCON_STATUS_INDEX_OUT_OF_RANGE = 4,
  CENCON_STATUS_INTERNAL_ERROR = 5,
} CenconStatus;

/**
 * Opaque handle: a parsed job specification.
 */
typedef struct CenconJob CenconJob;

/**
 * Opaque handle: a finished search plus classification.
 */
typedef struct CenconResult CenconResult;

/**
 * Per-shape labeled class counts (mirrors the text table).
 */
typedef struct CenconCounts {
  uint64_t collinear;
  uint64_t concave;
  uint64_t convex;
  uint64_t spatial;
  uint64_t unresolved;
  uint64_t total;
} CenconCounts;

/**
 * Summary of one equivalence class.
 */
typedef struct CenconClassInfo {
  /**
   * 0 collinear, 1 concave, 2 convex, 3 spatial, 4 unresolved.
   */
  uint32_t shape;
  uint64_t labeled_count;
  uint64_t stabilizer;
  uint64_t member_count;
} CenconClassInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a job config (same format the CLI reads) into a handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated C string and `out` a valid
 * pointer; on success `*out` owns the job and must be released with
 * [`cencon_job_free`].
 */
enum CenconStatus cencon_job_parse(const char *text, struct CenconJob **out);

/**
 * Releases a job handle. Accepts NULL.
 *
 * # Safety
 * `job` must come from [`cencon_job_parse`] and not be freed twice.
 */
void cencon_job_free(struct CenconJob *job);

/**
 * Runs the search and classification for a parsed job. `max_boxes`
 * bounds the box budget (0 means unlimited).
 *
 * # Safety
 * `job` must be a live handle from [`cencon_job_parse`]; on success
 * `*out` must be released with [`cencon_result_free`].
 */
enum CenconStatus cencon_job_run(const struct CenconJob *job,
                                 uint64_t max_boxes,
                                 struct CenconResult **out);

/**
 * Releases a result handle. Accepts NULL.
 *
 * # Safety
 * `result` must come from [`cencon_job_run`] and not be freed twice.
 */
void cencon_result_free(struct CenconResult *result);

/**
 * 1 when the run was conclusive (no undecided boxes), else 0.
 *
 * # Safety
 * `result` must be a live handle.
 */
int32_t cencon_result_conclusive(const struct CenconResult *result);

/**
 * Copies the per-shape labeled class counts into `out`.
 *
 * # Safety
 * Both pointers must be valid.
 */
enum CenconStatus cencon_result_counts(const struct CenconResult *result, struct CenconCounts *out);

/**
 * Number of (geometric) equivalence classes in the result.
 *
 * # Safety
 * `result` must be a live handle.
 */
uintptr_t cencon_result_class_count(const struct CenconResult *result);

/**
 * Copies a class summary into `out`.
 *
 * # Safety
 * Both pointers must be valid; `index` below the class count.
 */
enum CenconStatus cencon_result_class_info(const struct CenconResult *result,
                                           uintptr_t index,
                                           struct CenconClassInfo *out);

/**
 * Serializes the full result (runs, table, classes) as a JSON string
 * allocated for the caller; release with [`cencon_string_free`].
 *
 * # Safety
 * `result` must be a live handle.
 */
char *cencon_result_json(const struct CenconResult *result);

/**
 * Releases a string returned by this library. Accepts NULL.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void cencon_string_free(char *s);

/**
 * Library version as a static string; do not free.
 */
const char *cencon_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CENCON_H */
