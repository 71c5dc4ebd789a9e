#ifndef SEQLAB_H
#define SEQLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum SeqlabStatus {
  SEQLAB_STATUS_OK = 0,
  SEQLAB_STATUS_NULL_POINTER = 1,
  SEQLAB_STATUS_INVALID_ARGUMENT = 2,
  SEQLAB_STATUS_BUDGET_EXCEEDED = 3,
  SEQLAB_STATUS_VERIFICATION_FAILED = 4,
  SEQLAB_STATUS_OUT_OF_RANGE = 5,
  SEQLAB_STATUS_BUFFER_TOO_SMALL = 6,
  SEQLAB_STATUS_PANIC = 7,
} SeqlabStatus;

/**
 * A finite binary prefix.
 */
typedef struct SeqlabSequence SeqlabSequence;

/**
 * A numeration system `U`.
 */
typedef struct SeqlabSystem SeqlabSystem;

/**
 * Maximizer of one correlation measure. `d_star` holds `order` offsets
 * when the caller supplied a buffer.
 */
typedef struct SeqlabCorrelation {
  uint64_t value;
  size_t m_star;
  size_t order;
} SeqlabCorrelation;

typedef struct SeqlabWellDistribution {
  uint64_t value;
  size_t a_star;
  size_t b_star;
  size_t m_star;
} SeqlabWellDistribution;

/**
 * A verified lower bound `C_order(s, N) >= block` for `N >= implied_n`.
 */
typedef struct SeqlabCertificate {
  size_t order;
  size_t m;
  uint64_t block;
  uint64_t implied_n;
  bool verified;
} SeqlabCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static, nul-terminated string.
 */
const char *seqlab_version(void);

/**
 * Message for the last failure on this thread, or null after a success.
 * Valid until the next call on the same thread.
 */
const char *seqlab_last_error(void);

/**
 * Loads a system preset such as `"fibonacci"` or `"ex41"`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum SeqlabStatus seqlab_system_preset(const char *name, struct SeqlabSystem **out_system);

/**
 * # Safety
 * `system` must come from [`seqlab_system_preset`] or be null.
 */
void seqlab_system_free(struct SeqlabSystem *system);

/**
 * `U(i)`, failing with `OutOfRange` above `u64::MAX`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SeqlabStatus seqlab_system_value(const struct SeqlabSystem *system,
                                      size_t i,
                                      uint64_t *out_value);

/**
 * Greedy representation of `n`, most significant digit first. Writes the
 * length to `out_len` even when `cap` is too small.
 *
 * # Safety
 * `digits` must hold `cap` elements unless `cap` is 0.
 */
enum SeqlabStatus seqlab_system_rep(const struct SeqlabSystem *system,
                                    uint64_t n,
                                    uint32_t *digits,
                                    size_t cap,
                                    size_t *out_len);

/**
 * First `n` symbols of a sequence preset such as `"thue_morse"`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out_sequence` a valid pointer.
 */
enum SeqlabStatus seqlab_sequence_generate(const char *name,
                                           size_t n,
                                           struct SeqlabSequence **out_sequence);

/**
 * Wraps caller-supplied binary symbols.
 *
 * # Safety
 * `symbols` must hold `len` bytes.
 */
enum SeqlabStatus seqlab_sequence_from_symbols(const uint8_t *symbols,
                                               size_t len,
                                               struct SeqlabSequence **out_sequence);

/**
 * # Safety
 * `sequence` must come from this library or be null.
 */
void seqlab_sequence_free(struct SeqlabSequence *sequence);

/**
 * Number of symbols, or 0 for a null handle.
 *
 * # Safety
 * `sequence` must be valid or null.
 */
size_t seqlab_sequence_len(const struct SeqlabSequence *sequence);

/**
 * # Safety
 * Pointers must be valid.
 */
enum SeqlabStatus seqlab_sequence_get(const struct SeqlabSequence *sequence,
                                      size_t i,
                                      uint8_t *out_symbol);

/**
 * Copies up to `cap` symbols into `buf`; the number written goes to `out_written`.
 *
 * # Safety
 * `buf` must hold `cap` bytes unless `cap` is 0.
 */
enum SeqlabStatus seqlab_sequence_copy(const struct SeqlabSequence *sequence,
                                       uint8_t *buf,
                                       size_t cap,
                                       size_t *out_written);

/**
 * Exact `C_k(s, N)`. A zero `budget` selects the default step budget.
 * If `d_star` is non-null it receives `k` offsets.
 *
 * # Safety
 * `d_star` must hold `k` elements when non-null.
 */
enum SeqlabStatus seqlab_correlation(const struct SeqlabSequence *sequence,
                                     size_t n,
                                     size_t k,
                                     uint64_t budget,
                                     struct SeqlabCorrelation *out_result,
                                     size_t *d_star);

/**
 * Exact `W(s, N)`. A zero `budget` selects the default step budget.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SeqlabStatus seqlab_well_distribution(const struct SeqlabSequence *sequence,
                                           size_t n,
                                           uint64_t budget,
                                           struct SeqlabWellDistribution *out_result);

/**
 * Builds and verifies an order-`order` certificate for an automatic
 * sequence preset. With `m == 0` the largest block fitting in `capacity`
 * symbols is chosen. Positions go to `positions` (`order` elements) when
 * non-null.
 *
 * # Safety
 * `name` must be a nul-terminated string; `positions` must hold `order`
 * elements when non-null.
 */
enum SeqlabStatus seqlab_certify(const char *name,
                                 size_t order,
                                 size_t m,
                                 size_t capacity,
                                 struct SeqlabCertificate *out_certificate,
                                 uint64_t *positions);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEQLAB_H */
