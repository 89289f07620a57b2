#ifndef TWINMAT_H
#define TWINMAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum TwmStatus {
  TWM_STATUS_OK = 0,
  TWM_STATUS_NULL_POINTER = 1,
  TWM_STATUS_INVALID_UTF8 = 2,
  TWM_STATUS_PARSE = 3,
  TWM_STATUS_INVALID_ARGUMENT = 4,
  TWM_STATUS_FORMAT = 5,
  TWM_STATUS_OUT_OF_BOUNDS = 6,
  TWM_STATUS_INTERNAL = 7,
} TwmStatus;

// Bit accounting for `twm_oracle_total_bits`.
typedef enum TwmAccounting {
  TWM_ACCOUNTING_PACKED = 0,
  TWM_ACCOUNTING_PAPER = 1,
} TwmAccounting;

// Immutable compact oracle; safe to query from several threads.
typedef struct TwmOracle TwmOracle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds an oracle from decomposition text (`n k` header, then `k` lines
// `r1 r2 c1 c2`, 1-based inclusive).
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum TwmStatus twm_oracle_build(const char *text, double beta, struct TwmOracle **out);

// Loads a serialized oracle.
//
// # Safety
// `data` must point to `len` readable bytes; `out` must be writable.
enum TwmStatus twm_oracle_from_bytes(const uint8_t *data, size_t len, struct TwmOracle **out);

// Serializes an oracle into a library-owned buffer; free it with
// `twm_bytes_free(*data, *len)`.
//
// # Safety
// `oracle` must be a live handle; `data` and `len` must be writable.
enum TwmStatus twm_oracle_to_bytes(const struct TwmOracle *oracle, uint8_t **data, size_t *len);

// Releases a buffer returned by `twm_oracle_to_bytes`.
//
// # Safety
// `data` and `len` must come from one `twm_oracle_to_bytes` call, or
// `data` must be null.
void twm_bytes_free(uint8_t *data, size_t len);

// Entry `(i, j)`, 1-based. `hops` (optional) receives the number of
// child ids followed.
//
// # Safety
// `oracle` must be a live handle; `bit` must be writable; `hops` may be
// null.
enum TwmStatus twm_oracle_query(const struct TwmOracle *oracle,
                                size_t i,
                                size_t j,
                                uint8_t *bit,
                                size_t *hops);

// Matrix order, or 0 for a null handle.
//
// # Safety
// `oracle` must be a live handle or null.
size_t twm_oracle_n(const struct TwmOracle *oracle);

// Number of layers below the root (hops per query), or 0 for a null
// handle.
//
// # Safety
// `oracle` must be a live handle or null.
size_t twm_oracle_depth(const struct TwmOracle *oracle);

// Total size in bits under the given accounting (a `TwmAccounting`
// value).
//
// # Safety
// `oracle` must be a live handle; `bits` must be writable.
enum TwmStatus twm_oracle_total_bits(const struct TwmOracle *oracle,
                                     uint32_t accounting,
                                     uint64_t *bits);

// Releases a handle; null is ignored.
//
// # Safety
// `oracle` must be a handle from this library, not yet freed, or null.
void twm_oracle_free(struct TwmOracle *oracle);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `cap > 0`) and returns its full length in
// bytes.
//
// # Safety
// `buf` must point to `cap` writable bytes, or be null with `cap == 0`.
size_t twm_last_error(char *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWINMAT_H */
