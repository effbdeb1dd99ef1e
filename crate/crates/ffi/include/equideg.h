#ifndef EQUIDEG_H
#define EQUIDEG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Values 0 to 6 coincide with the command-line exit codes.
 */
typedef enum EqdStatus {
  EQD_STATUS_OK = 0,
  EQD_STATUS_OTHER = 1,
  EQD_STATUS_INVALID_INPUT = 2,
  EQD_STATUS_NO_CERTIFICATE = 3,
  EQD_STATUS_DEGENERATE = 4,
  EQD_STATUS_NON_ISOLATED = 5,
  EQD_STATUS_CAPACITY = 6,
  EQD_STATUS_NULL_POINTER = 7,
  EQD_STATUS_PANIC = 8,
} EqdStatus;

/**
 * An element of the tracked Burnside sublattice.
 */
typedef struct EqdElement EqdElement;

/**
 * Memoised table of Bessel zeros.
 */
typedef struct EqdZeroTable EqdZeroTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *eqd_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void eqd_string_free(char *s);

/**
 * Bessel function of the first kind `J_m(x)`, for `x >= 0`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum EqdStatus eqd_bessel_j(uint32_t m, double x, double *out);

/**
 * Creates a zero table. Zero for either cap selects the default.
 *
 * # Safety
 * `out` must be a valid pointer; the handle written there must be freed with
 * [`eqd_table_free`].
 */
enum EqdStatus eqd_table_new(uint32_t mode_cap, uint32_t index_cap, struct EqdZeroTable **out);

/**
 * # Safety
 * `table` must be NULL or a handle from [`eqd_table_new`] not yet freed.
 */
void eqd_table_free(struct EqdZeroTable *table);

/**
 * The `n`-th positive zero of `J_m` (`n >= 1`).
 *
 * # Safety
 * `table` must be a live handle and `out` a valid pointer.
 */
enum EqdStatus eqd_table_zero(const struct EqdZeroTable *table,
                              uint32_t m,
                              uint32_t n,
                              double *out);

/**
 * Dirichlet eigenvalue `s_{m,n}` of the unit disc, the square of the zero.
 *
 * # Safety
 * `table` must be a live handle and `out` a valid pointer.
 */
enum EqdStatus eqd_table_eigenvalue(const struct EqdZeroTable *table,
                                    uint32_t m,
                                    uint32_t n,
                                    double *out);

/**
 * Compatibility predicate on a set of positive modes.
 *
 * # Safety
 * `modes` must point to `len` values (it may be NULL when `len` is 0) and
 * `out` must be a valid pointer.
 */
enum EqdStatus eqd_predicate_b(const uint32_t *modes, size_t len, bool *out);

/**
 * Coefficient of `(H_{m0})` in the product of basic degrees over `modes`,
 * from the closed-form sum.
 *
 * # Safety
 * As for [`eqd_predicate_b`].
 */
enum EqdStatus eqd_closed_form_coeff(const uint32_t *modes, size_t len, uint32_t m0, int64_t *out);

/**
 * Product of the basic degrees of `modes` (the empty product is the unit).
 *
 * # Safety
 * `modes` as for [`eqd_predicate_b`]; the handle written to `out` must be
 * freed with [`eqd_element_free`].
 */
enum EqdStatus eqd_element_product(const uint32_t *modes, size_t len, struct EqdElement **out);

/**
 * Ring product of two elements.
 *
 * # Safety
 * `a` and `b` must be live handles; the result must be freed with
 * [`eqd_element_free`].
 */
enum EqdStatus eqd_element_multiply(const struct EqdElement *a,
                                    const struct EqdElement *b,
                                    struct EqdElement **out);

/**
 * Coefficient of an orbit type: `m0 = 0` reads the unit `(G)`, `m0 >= 1`
 * reads `(H_{m0})`.
 *
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum EqdStatus eqd_element_coeff(const struct EqdElement *e, uint32_t m0, int64_t *out);

/**
 * JSON form of an element.
 *
 * # Safety
 * `e` must be a live handle; the string written to `out` must be freed with
 * [`eqd_string_free`].
 */
enum EqdStatus eqd_element_json(const struct EqdElement *e, char **out);

/**
 * # Safety
 * `e` must be NULL or a live handle.
 */
void eqd_element_free(struct EqdElement *e);

/**
 * Existence report for a matrix or spectrum given as JSON, in the same
 * format as the `exist` command. Returns `NoCertificate` (with a report) when
 * the degree gives no certificate.
 *
 * # Safety
 * `input` must be a NUL-terminated string; the report written to `out` must
 * be freed with [`eqd_string_free`].
 */
enum EqdStatus eqd_exist_json(const char *input, bool assert_hypotheses, char **out);

/**
 * Bifurcation report for a family given as JSON. When `lo < hi` the
 * interval `[lo, hi]` replaces any domain in the input; pass `lo = hi` to
 * use the input's own domain.
 *
 * # Safety
 * As for [`eqd_exist_json`].
 */
enum EqdStatus eqd_bifurcate_json(const char *input,
                                  double lo,
                                  double hi,
                                  bool assert_hypotheses,
                                  char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQUIDEG_H */
