#ifndef BINEC_H
#define BINEC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Distance reported by [`binec_codebook_decode`] when no codeword is reachable.
#define BINEC_DISTANCE_INFINITE UINT64_MAX

typedef enum BinecStatus {
  BINEC_STATUS_OK = 0,
  BINEC_STATUS_NULL_POINTER = 1,
  BINEC_STATUS_INVALID_ARGUMENT = 2,
  BINEC_STATUS_PARSE = 3,
  BINEC_STATUS_GUARD = 4,
  BINEC_STATUS_SINGULAR = 5,
  BINEC_STATUS_OUT_OF_RANGE = 6,
  BINEC_STATUS_REGIME = 7,
  BINEC_STATUS_RETRIES = 8,
  BINEC_STATUS_IO = 9,
  BINEC_STATUS_PANIC = 10,
} BinecStatus;

typedef struct BinecCodebook BinecCodebook;

typedef struct BinecField BinecField;

typedef struct BinecNetwork BinecNetwork;

typedef struct BinecTransfer BinecTransfer;

// Rates at one parameter point; undefined entries are NaN and `k_star` is 0 when absent.
typedef struct BinecRateReport {
  double hamming_asym;
  double hamming_finite;
  double gv_asym;
  double gv_finite_coh;
  double gv_finite_noncoh;
  double r1;
  double r2;
  uint32_t k_star;
  double r_ours;
  bool regime_ok;
} BinecRateReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the next call.
const char *binec_last_error_message(void);

// # Safety
// `out` must be valid for writes.
enum BinecStatus binec_field_new(uint32_t m, struct BinecField **field_out);

// # Safety
// `field` must come from [`binec_field_new`] and not be used afterwards.
void binec_field_free(struct BinecField *field);

// # Safety
// Pointers must be valid.
enum BinecStatus binec_field_mul(const struct BinecField *field,
                                 uint32_t a,
                                 uint32_t b,
                                 uint32_t *result);

// # Safety
// Pointers must be valid.
enum BinecStatus binec_field_inv(const struct BinecField *field, uint32_t a, uint32_t *result);

// # Safety
// `result` must be valid for writes.
enum BinecStatus binec_entropy(double p, double *result);

// `n = 0` requests the asymptotic forms only.
//
// # Safety
// `report` must be valid for writes.
enum BinecStatus binec_rate_report(double p,
                                   uint32_t c,
                                   uint32_t e,
                                   uint32_t m,
                                   uint32_t n,
                                   struct BinecRateReport *report);

// Parses the text network format.
//
// # Safety
// `text` must be a nul-terminated string and `network_out` valid for writes.
enum BinecStatus binec_network_parse(const char *text_in, struct BinecNetwork **network_out);

// # Safety
// `network` must come from [`binec_network_parse`] and not be used afterwards.
void binec_network_free(struct BinecNetwork *network);

// Validates the network and reports its mincut `C` and edge count `E`.
//
// # Safety
// Pointers must be valid.
enum BinecStatus binec_network_capacity(const struct BinecNetwork *network,
                                        uint32_t *c,
                                        uint32_t *e);

// Draws coding coefficients with seeds `seed, seed + 1, ...` until `T̂` is MDS.
//
// # Safety
// Pointers must be valid.
enum BinecStatus binec_transfer_sample(const struct BinecNetwork *network,
                                       const struct BinecField *field,
                                       uint64_t seed,
                                       uint32_t max_retries,
                                       struct BinecTransfer **transfer_out);

// An MDS `C x E` impulse response with source edges `0..C`: Cauchy when
// `2^m >= C + E`, seeded random otherwise.
//
// # Safety
// Pointers must be valid.
enum BinecStatus binec_transfer_synthetic(const struct BinecField *field,
                                          uint32_t c,
                                          uint32_t e,
                                          uint64_t seed,
                                          uint32_t max_retries,
                                          struct BinecTransfer **transfer_out);

// # Safety
// `transfer` must come from a `binec_transfer_*` constructor and not be used afterwards.
void binec_transfer_free(struct BinecTransfer *transfer);

// # Safety
// Pointers must be valid.
enum BinecStatus binec_transfer_dims(const struct BinecTransfer *transfer,
                                     uint32_t *c,
                                     uint32_t *e);

// # Safety
// Pointers must be valid.
enum BinecStatus binec_transfer_is_mds(const struct BinecTransfer *transfer, bool *result);

// `Y = lift(T) X + lift(T̂) Z` with `X` of `Cm x n`, `Z` of `Em x n` and `Y` of `Cm x n` bits.
//
// # Safety
// Buffers must hold the stated number of bytes.
enum BinecStatus binec_transmit(const struct BinecTransfer *transfer,
                                uint32_t n,
                                const uint8_t *x,
                                size_t x_len,
                                const uint8_t *z,
                                size_t z_len,
                                uint8_t *y,
                                size_t y_len);

// Greedy codebook for `p = p_num / p_den`. Non-coherent books use every MDS
// matrix over the field as the family, with the transfer's source edges.
//
// # Safety
// Pointers must be valid.
enum BinecStatus binec_codebook_build(const struct BinecTransfer *transfer,
                                      uint32_t n,
                                      uint64_t p_num,
                                      uint64_t p_den,
                                      uint64_t seed,
                                      bool noncoherent,
                                      struct BinecCodebook **codebook_out);

// # Safety
// `codebook` must come from a `binec_codebook_*` constructor and not be used afterwards.
void binec_codebook_free(struct BinecCodebook *codebook);

// # Safety
// Pointers must be valid.
enum BinecStatus binec_codebook_len(const struct BinecCodebook *codebook, size_t *len);

// Rows `Cm` and columns `n` of each codeword.
//
// # Safety
// Pointers must be valid.
enum BinecStatus binec_codebook_shape(const struct BinecCodebook *codebook,
                                      uint32_t *rows,
                                      uint32_t *cols);

// Writes codeword `message` into `x` (`Cm * n` bytes).
//
// # Safety
// `x` must hold `x_len` bytes.
enum BinecStatus binec_codebook_encode(const struct BinecCodebook *codebook,
                                       size_t message,
                                       uint8_t *x,
                                       size_t x_len);

// Minimum-distance decoding of `y` (`Cm * n` bytes). Coherent books need
// `transfer`; non-coherent ones ignore it and may be passed null.
//
// # Safety
// Pointers must be valid; `y` must hold `y_len` bytes.
enum BinecStatus binec_codebook_decode(const struct BinecCodebook *codebook,
                                       const struct BinecTransfer *transfer,
                                       const uint8_t *y,
                                       size_t y_len,
                                       size_t *message,
                                       uint64_t *distance,
                                       bool *unique);

// # Safety
// `path` must be a nul-terminated string.
enum BinecStatus binec_codebook_write(const struct BinecCodebook *codebook, const char *path);

// # Safety
// `path` must be a nul-terminated string and `codebook_out` valid for writes.
enum BinecStatus binec_codebook_read(const char *path, struct BinecCodebook **codebook_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BINEC_H */
