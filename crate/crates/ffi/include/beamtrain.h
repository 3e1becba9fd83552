#ifndef BEAMTRAIN_H
#define BEAMTRAIN_H

/* Generated by cbindgen from beamtrain-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum BtStatus {
  BtOk = 0,
  BtNullPointer = 1,
  BtInvalidArgument = 2,
  BtDegenerate = 3,
  BtInsufficientBudget = 4,
  BtInvalidState = 5,
  BtInsufficientData = 6,
  BtIo = 7,
  BtPanic = 8,
} BtStatus;

/**
 * Training policy selector.
 */
typedef enum BtAlgorithm {
  BtExhaustive = 0,
  BtAdaptive = 1,
} BtAlgorithm;

/**
 * Per-beam effective gains of a codebook/channel pair.
 */
typedef struct BtGainProfile BtGainProfile;

/**
 * Gap structure and error exponents of one operating point.
 */
typedef struct BtExponents {
  /**
   * Index of the strongest beam.
   */
  size_t opt_index;
  /**
   * Index of its strongest competitor.
   */
  size_t second_best;
  /**
   * Square-root gap between them.
   */
  double delta_min;
  /**
   * Worst-case rank/gap trade-off `max_l l * delta_(l)^-2`.
   */
  double hardness;
  /**
   * Rank attaining the hardness maximum (1-based).
   */
  size_t hard_rank;
  /**
   * Schedule normalizer `1/2 + sum_{i=2..L} 1/i`.
   */
  double logbar;
  /**
   * Budget exponent of uniform exhaustive training.
   */
  double exhaustive;
  /**
   * Guaranteed budget exponent of the adaptive allocation.
   */
  double adaptive_bound;
} BtExponents;

/**
 * Monte Carlo misalignment estimate with a 95% Wilson interval.
 */
typedef struct BtEstimate {
  double p_hat;
  double ci_low;
  double ci_high;
  uint64_t misaligned;
  uint64_t trials;
} BtEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bt_version(void);

/**
 * Static name of a status code.
 */
const char *bt_status_name(enum BtStatus status);

/**
 * Computes the per-beam gain profile of an `l_beams` DFT codebook for
 * a single-path channel with complex gain `alpha_re + i alpha_im`
 * arriving at `phi` radians. On success `*out` owns the new handle.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BtStatus bt_gain_profile_new(size_t l_beams,
                                  double alpha_re,
                                  double alpha_im,
                                  double phi,
                                  struct BtGainProfile **out);

/**
 * Number of beams in a gain profile; 0 for a null handle.
 *
 * # Safety
 * `profile` must be null or a live handle from [`bt_gain_profile_new`].
 */
size_t bt_gain_profile_len(const struct BtGainProfile *profile);

/**
 * Index of the strongest beam.
 *
 * # Safety
 * `profile` must be null or a live handle; `out` must be valid.
 */
enum BtStatus bt_gain_profile_opt_index(const struct BtGainProfile *profile, size_t *out);

/**
 * Copies all per-beam gains into `buf`, which must hold exactly
 * `bt_gain_profile_len` values.
 *
 * # Safety
 * `profile` must be null or a live handle; `buf` must point to `len`
 * writable doubles.
 */
enum BtStatus bt_gain_profile_gains(const struct BtGainProfile *profile, double *buf, size_t len);

/**
 * Releases a gain profile handle. Null is a no-op.
 *
 * # Safety
 * `profile` must be null or a live handle, and must not be used again.
 */
void bt_gain_profile_free(struct BtGainProfile *profile);

/**
 * Gap structure and theoretical exponents for one operating point.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BtStatus bt_exponents(size_t l_beams,
                           double alpha_re,
                           double alpha_im,
                           double phi,
                           double snr_db,
                           struct BtExponents *out);

/**
 * Cumulative per-phase symbol counts of the adaptive schedule.
 * `out_counts` must hold exactly `l_beams - 1` values.
 *
 * # Safety
 * `out_counts` must point to `len` writable 64-bit integers.
 */
enum BtStatus bt_phase_schedule(uint64_t budget, size_t l_beams, uint64_t *out_counts, size_t len);

/**
 * Monte Carlo misalignment estimate of one operating point. Identical
 * `seed` always reproduces the identical estimate.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BtStatus bt_estimate_misalignment(size_t l_beams,
                                       double alpha_re,
                                       double alpha_im,
                                       double phi,
                                       double snr_db,
                                       uint64_t budget,
                                       enum BtAlgorithm algorithm,
                                       uint64_t trials,
                                       uint64_t seed,
                                       struct BtEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BEAMTRAIN_H */
