/* C interface to polydiam: finite-field Cayley graph diameters and bounds. */

#ifndef POLYDIAM_H
#define POLYDIAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum PdStatus {
  PD_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PD_STATUS_NULL_POINTER = 1,
  /**
   * Invalid input: not a prime power, reducible modulus, bad degree, ...
   */
  PD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The request exceeds a resource cap (see the error message).
   */
  PD_STATUS_RESOURCE_CAP = 3,
  /**
   * The bound's precondition does not hold for these parameters.
   */
  PD_STATUS_NOT_APPLICABLE = 4,
  /**
   * The result does not fit the output type.
   */
  PD_STATUS_OVERFLOW = 5,
  PD_STATUS_INTERNAL = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  PD_STATUS_PANIC = 7,
} PdStatus;

/**
 * Opaque handle to `F_{q^n}` with its modulus and resource caps.
 */
typedef struct PdField PdField;

/**
 * Diameter of the Cayley digraph on `F_{q^n}^*`.
 */
typedef struct PdDiameter {
  bool connected;
  /**
   * `UINT32_MAX` when the graph is disconnected.
   */
  uint32_t diameter;
  /**
   * Number of distinct generator values.
   */
  uint64_t distinct_generators;
  /**
   * Out-degree counted with multiplicity (`#P_d`).
   */
  uint64_t regularity;
} PdDiameter;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create `F_{q^n}`. `modulus` is either null (use the first monic
 * irreducible of degree `n` in code order) or a NUL-terminated list of
 * ascending coefficient codes such as `"1,1,0,1"`.
 *
 * # Safety
 * `modulus` must be null or a valid C string; `out` must be valid for writes.
 */
enum PdStatus pd_field_new(uint64_t q, uint32_t n, const char *modulus, struct PdField **out);

/**
 * Release a field. Null is ignored.
 *
 * # Safety
 * `field` must be null or a handle from [`pd_field_new`] not yet freed.
 */
void pd_field_free(struct PdField *field);

/**
 * Number of elements `q^n`.
 *
 * # Safety
 * `field` must be a live handle; `out` must be valid for writes.
 */
enum PdStatus pd_field_order(const struct PdField *field, uint64_t *out);

/**
 * The modulus as ascending coefficient codes, e.g. `"1,1,0,1"`. Release
 * with [`pd_string_free`].
 *
 * # Safety
 * `field` must be a live handle; `out` must be valid for writes.
 */
enum PdStatus pd_field_modulus(const struct PdField *field, char **out);

/**
 * Override the largest group order `q^n - 1` accepted by [`pd_diameter`]
 * and [`pd_max_weil_ratio`] for this handle.
 *
 * # Safety
 * `field` must be a live handle.
 */
enum PdStatus pd_field_set_max_order(struct PdField *field, uint64_t max_order);

/**
 * Exact diameter of the Cayley digraph generated by the values at `alpha`
 * of the monic prime-power polynomials of degree `d` (`1 <= d < n`).
 *
 * # Safety
 * `field` must be a live handle; `out` must be valid for writes.
 */
enum PdStatus pd_diameter(const struct PdField *field, uint32_t d, struct PdDiameter *out);

/**
 * Number of monic irreducible polynomials of degree `d` over `F_q`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PdStatus pd_count_irreducibles(uint64_t q, uint32_t d, uint64_t *out);

/**
 * The baseline diameter bound, valid for `n >= 2` and `n < q^(d/2) + 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PdStatus pd_bound_baseline(uint64_t q, uint64_t n, uint64_t d, double *out);

/**
 * The improved bound for `d >= 2`, valid for `2d + 1 <= n < q^(d/2) + 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PdStatus pd_bound_improved(uint64_t q, uint64_t n, uint64_t d, double *out);

/**
 * The improved bound for `d = 1`, valid for `3 <= n < q^(1/2) + 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PdStatus pd_bound_improved_linear(uint64_t q, uint64_t n, double *out);

/**
 * `max_{j != 0} |S(chi_j)| / ((n - 1) q^(d/2))`; at most 1 up to rounding.
 *
 * # Safety
 * `field` must be a live handle; `out` must be valid for writes.
 */
enum PdStatus pd_max_weil_ratio(const struct PdField *field, uint32_t d, double *out);

/**
 * A copy of the calling thread's last error message, or null if none.
 * Release with [`pd_string_free`].
 */
char *pd_last_error_message(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void pd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYDIAM_H */
