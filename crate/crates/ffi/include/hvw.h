#ifndef HVW_H
#define HVW_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of doubles in an orbit point.
 */
#define HVW_POINT_LEN 24

typedef enum HvwStatus {
  HVW_STATUS_OK = 0,
  HVW_STATUS_NULL_POINTER = 1,
  HVW_STATUS_INVALID_ARGUMENT = 2,
  HVW_STATUS_NUMERICAL = 3,
  HVW_STATUS_BUFFER_TOO_SMALL = 4,
  HVW_STATUS_PANIC = 5,
} HvwStatus;

/**
 * Opaque genus-2 quadric system.
 */
typedef struct HvwQuadric HvwQuadric;

/**
 * Opaque verification report.
 */
typedef struct HvwReport HvwReport;

/**
 * Borrowed view of one check record; `name` lives as long as the report.
 */
typedef struct HvwRecord {
  const char *name;
  double residual;
  bool passed;
  size_t count;
} HvwRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *hvw_last_error(void);

/**
 * Builds a system from six distinct branch points `mu` (12 doubles).
 *
 * # Safety
 * `mu` must point to 12 readable doubles and `out` to a writable handle slot.
 */
enum HvwStatus hvw_quadric_new(const double *mu, struct HvwQuadric **out);

/**
 * # Safety
 * `q` must be null or a handle from [`hvw_quadric_new`] not yet freed.
 */
void hvw_quadric_free(struct HvwQuadric *q);

/**
 * Seeded admissible point written to `point_out` (24 doubles).
 *
 * # Safety
 * `q` must be a live handle and `point_out` must have room for 24 doubles.
 */
enum HvwStatus hvw_quadric_sample(const struct HvwQuadric *q, uint64_t seed, double *point_out);

/**
 * The six Hamiltonians at `point`, written as 12 doubles.
 *
 * # Safety
 * `point` must hold 24 doubles and `out` must have room for 12.
 */
enum HvwStatus hvw_quadric_hamiltonians(const struct HvwQuadric *q,
                                        const double *point,
                                        double *out);

/**
 * Largest reduced bracket `|{f_i, f_j}|` at an admissible `point`.
 *
 * # Safety
 * `point` must hold 24 doubles and `max_out` must be writable.
 */
enum HvwStatus hvw_quadric_commutation(const struct HvwQuadric *q,
                                       const double *point,
                                       double *max_out);

/**
 * Common roots of the critical-locus polynomials. Writes up to `capacity`
 * roots (2 doubles each) and the total count to `count_out`; returns
 * `BufferTooSmall` when the count exceeds `capacity`.
 *
 * # Safety
 * `point` must hold 24 doubles, `roots_out` must have room for
 * `2 * capacity` doubles (may be null when `capacity` is 0).
 */
enum HvwStatus hvw_quadric_critical_locus(const struct HvwQuadric *q,
                                          const double *point,
                                          double tol,
                                          double *roots_out,
                                          size_t capacity,
                                          size_t *count_out);

/**
 * Residuals of the semiflat triple for the quadratic prepotential
 * `½ xᵀ H x` with the standard pairing: `out[0]` the quaternion relations,
 * `out[1]` the largest `|dω_k|`. `hessian` is `2m × 2m` row-major, `x` has `2m` entries.
 *
 * # Safety
 * `hessian` must hold `4m²` doubles, `x` `2m` doubles and `out` room for 2.
 */
enum HvwStatus hvw_semiflat_quadratic_residuals(size_t m,
                                                const double *hessian,
                                                const double *x,
                                                double *out);

/**
 * Runs the suites described by `config_json` (null for the defaults).
 * Check failures are reported through the handle, not the status.
 *
 * # Safety
 * `config_json` must be null or a nul-terminated UTF-8 string; `out` must be writable.
 */
enum HvwStatus hvw_verify_run(const char *config_json, struct HvwReport **out);

/**
 * # Safety
 * `r` must be null or a handle from [`hvw_verify_run`] not yet freed.
 */
void hvw_report_free(struct HvwReport *r);

/**
 * Whether every record passed; false for a null handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
bool hvw_report_passed(const struct HvwReport *r);

/**
 * # Safety
 * `r` must be null or a live report handle.
 */
size_t hvw_report_record_count(const struct HvwReport *r);

/**
 * # Safety
 * `r` must be a live report handle and `out` writable.
 */
enum HvwStatus hvw_report_record(const struct HvwReport *r, size_t index, struct HvwRecord *out);

/**
 * Full JSON report, owned by the handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
const char *hvw_report_json(const struct HvwReport *r);

/**
 * CSV residual table, owned by the handle.
 *
 * # Safety
 * `r` must be null or a live report handle.
 */
const char *hvw_report_residual_table(const struct HvwReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HVW_H */
