#ifndef ROTKIT_H
#define ROTKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum RotkitStatus {
  ROTKIT_STATUS_OK = 0,
  ROTKIT_STATUS_NULL_POINTER = 1,
  ROTKIT_STATUS_INVALID_UTF8 = 2,
  ROTKIT_STATUS_PARSE = 3,
  ROTKIT_STATUS_VALIDATION = 4,
  ROTKIT_STATUS_NOT_FOUND = 5,
  ROTKIT_STATUS_NO_CONVERGENCE = 6,
  ROTKIT_STATUS_WRONG_POINT_KIND = 7,
  ROTKIT_STATUS_INVALID_ARGUMENT = 8,
  ROTKIT_STATUS_NOT_APPLICABLE = 9,
  ROTKIT_STATUS_INTERNAL = 10,
  ROTKIT_STATUS_PANIC = 11,
} RotkitStatus;

typedef enum RotkitMethod {
  ROTKIT_METHOD_PICARD = 0,
  ROTKIT_METHOD_BISECTION = 1,
  ROTKIT_METHOD_HYBRID = 2,
} RotkitMethod;

/**
 * Opaque map handle.
 */
typedef struct RotkitMap RotkitMap;

/**
 * A located fixed point. The certificate fields are meaningful only when
 * `has_certificate` is true.
 */
typedef struct RotkitFixedPoint {
  double x_star;
  double residual;
  uint64_t iterations;
  enum RotkitMethod method;
  bool has_certificate;
  double rate;
  double tail_bound;
} RotkitFixedPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a JSON map file held in `json`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum RotkitStatus rotkit_map_from_json(const char *json, struct RotkitMap **out);

/**
 * Releases a map. Null is ignored.
 *
 * # Safety
 * `map` must come from `rotkit_map_from_json` and not be freed twice.
 */
void rotkit_map_free(struct RotkitMap *map);

/**
 * The map's canonical JSON form.
 *
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum RotkitStatus rotkit_map_to_json(const struct RotkitMap *map, char **out);

/**
 * `f(x)` for a real-valued map.
 *
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum RotkitStatus rotkit_map_eval(const struct RotkitMap *map, double x, double *out);

/**
 * Locates a fixed point to within `tol`.
 *
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum RotkitStatus rotkit_solve(const struct RotkitMap *map,
                               double tol,
                               struct RotkitFixedPoint *out);

/**
 * `|f^n(x) - x| / |f(x) - x|` at a real point. `*defined` is false at fixed points.
 *
 * # Safety
 * `map` must be a live handle; `ratio` and `defined` valid for writes.
 */
enum RotkitStatus rotkit_rotativity_ratio(const struct RotkitMap *map,
                                          double x,
                                          uint32_t n,
                                          double *ratio,
                                          bool *defined);

/**
 * Rotativity and Lipschitz reports as JSON, in the CLI `analyze` shape.
 *
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum RotkitStatus rotkit_analyze_json(const struct RotkitMap *map, uint32_t n, char **out);

/**
 * Closed-form rotativity test for `x -> c x + x0` with complex `c`.
 *
 * # Safety
 * `rotative` and `sup` must be valid for writes.
 */
enum RotkitStatus rotkit_affine_criterion(double c_re,
                                          double c_im,
                                          double x0,
                                          uint32_t n,
                                          bool *rotative,
                                          double *sup);

/**
 * Sufficient test `b1 > (n c2 - c1) / (n - 1)` for a three-segment map.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RotkitStatus rotkit_pwl_criterion(double c1,
                                       double c2,
                                       double b1,
                                       double b2,
                                       uint32_t n,
                                       bool *out);

/**
 * The b1-side bound `1 + (c2 - c1) / (b1 - c2)` on the three-segment ratio.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RotkitStatus rotkit_pwl_sup_ratio(double c1, double c2, double b1, double b2, double *out);

/**
 * `a^n d1 / (1 - a)`, the Picard error bound after `n` steps.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RotkitStatus rotkit_tail_bound(double a, uint32_t n, double d1, double *out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void rotkit_string_free(char *s);

/**
 * The last error on this thread, or null. Valid until the next failing call
 * on the same thread; do not free.
 */
const char *rotkit_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROTKIT_H */
