#ifndef EISGOR_H
#define EISGOR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EisgorStatus {
  EISGOR_STATUS_OK = 0,
  EISGOR_STATUS_NULL_POINTER = 1,
  EISGOR_STATUS_INVALID_ARGUMENT = 2,
  EISGOR_STATUS_OUT_OF_SCOPE = 3,
  EISGOR_STATUS_ARITHMETIC = 4,
  EISGOR_STATUS_IO = 5,
  EISGOR_STATUS_PANIC = 6,
} EisgorStatus;

/**
 * Echelon basis of `M_k` over `Z/p^digits` to `precision` coefficients.
 */
typedef struct EisgorFormSpace EisgorFormSpace;

/**
 * Merged result of a Bernoulli pair scan.
 */
typedef struct EisgorScanReport EisgorScanReport;

/**
 * Gorenstein and principality checks at `(p, k)`.
 */
typedef struct EisgorStructureReport EisgorStructureReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *eisgor_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer returned by a `_to_json` function.
 */
void eisgor_string_free(char *s);

/**
 * `B_k mod p` for even `0 <= k <= p - 3`.
 *
 * # Safety
 * `out` must be a valid pointer to a `u64`.
 */
enum EisgorStatus eisgor_bernoulli_mod(uint64_t p, uint32_t k, uint64_t *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum EisgorStatus eisgor_form_space_new(uint64_t p,
                                        uint32_t digits,
                                        uint64_t k,
                                        size_t precision,
                                        struct EisgorFormSpace **out);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
size_t eisgor_form_space_dim(const struct EisgorFormSpace *h);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
size_t eisgor_form_space_precision(const struct EisgorFormSpace *h);

/**
 * Coefficient `a_n` of basis element `row`.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum EisgorStatus eisgor_form_space_coeff(const struct EisgorFormSpace *h,
                                          size_t row,
                                          size_t n,
                                          uint64_t *out);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
char *eisgor_form_space_to_json(const struct EisgorFormSpace *h);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void eisgor_form_space_free(struct EisgorFormSpace *h);

/**
 * Scans primes in `[p_min, p_max]`. `checkpoint` may be null.
 *
 * # Safety
 * `checkpoint` must be null or a nul-terminated UTF-8 path; `out` must be valid.
 */
enum EisgorStatus eisgor_scan(uint64_t p_min,
                              uint64_t p_max,
                              size_t shards,
                              const char *checkpoint,
                              struct EisgorScanReport **out);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
size_t eisgor_scan_primes_processed(const struct EisgorScanReport *h);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
size_t eisgor_scan_pair_hits(const struct EisgorScanReport *h);

/**
 * Number of primes in the report with at least one irregular index.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t eisgor_scan_irregular_count(const struct EisgorScanReport *h);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
char *eisgor_scan_to_json(const struct EisgorScanReport *h);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void eisgor_scan_free(struct EisgorScanReport *h);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum EisgorStatus eisgor_structure_verify(uint64_t p,
                                          uint64_t k,
                                          struct EisgorStructureReport **out);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
bool eisgor_structure_assertions_hold(const struct EisgorStructureReport *h);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
bool eisgor_structure_gorenstein(const struct EisgorStructureReport *h);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
size_t eisgor_structure_min_gens(const struct EisgorStructureReport *h);

/**
 * # Safety
 * `h` must be null or a live handle.
 */
char *eisgor_structure_to_json(const struct EisgorStructureReport *h);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void eisgor_structure_free(struct EisgorStructureReport *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EISGOR_H */
