#ifndef PLCSYNC_H
#define PLCSYNC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
enum PlcsyncStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  PlcsyncStatus_Ok = 0,
  PlcsyncStatus_NullPointer = 1,
  PlcsyncStatus_InvalidConfig = 2,
  PlcsyncStatus_BadDimensions = 3,
  /**
   * Estimation impossible on this input (all-null frame, Q < 2, ...).
   */
  PlcsyncStatus_Degenerate = 4,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum PlcsyncStatus PlcsyncStatus;
#else
typedef int32_t PlcsyncStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Opaque system handle: validated OFDM parameters plus the derived
 * subcarrier index sets.
 */
typedef struct PlcsyncSystem PlcsyncSystem;

/**
 * One joint timing estimate.
 */
typedef struct PlcsyncEstimate {
  /**
   * Fractional sampling phase offset, in samples.
   */
  double xi_hat;
  /**
   * Sampling clock offset (dimensionless).
   */
  double eta_hat;
  /**
   * Blind linear SNR estimate used by the bias erasure.
   */
  double snr_hat;
} PlcsyncEstimate;

/**
 * Closed-form performance prediction.
 */
typedef struct PlcsyncPrediction {
  double var_xi;
  double var_eta;
  double bias_xi;
  double bias_eta;
  double mse_xi;
  double mse_eta;
} PlcsyncPrediction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a system handle. `n_fft` must be a power of two >= 4, `n_null`
 * even with n_null < n_fft - 2, `n_blocks` >= 2 for estimation.
 *
 * # Safety
 * `out` must be a valid pointer. The returned handle must be released with
 * [`plcsync_system_free`].
 */
PlcsyncStatus plcsync_system_new(uint32_t n_fft,
                                 uint32_t n_cp,
                                 uint32_t n_blocks,
                                 uint32_t n_null,
                                 double t_sam,
                                 struct PlcsyncSystem **out);

/**
 * Releases a handle created by [`plcsync_system_new`]. A null pointer is
 * ignored.
 *
 * # Safety
 * `sys` must come from [`plcsync_system_new`] and not be used afterwards.
 */
void plcsync_system_free(struct PlcsyncSystem *sys);

/**
 * Joint non-data-aided estimation from a received frequency-domain frame.
 *
 * `grid` holds Q x N complex subcarrier values, row-major, interleaved as
 * re0, im0, re1, im1, ...; `len` must equal 2 * n_blocks * n_fft. `phi` is
 * the phase-unwrapping tolerance in [0, 2] (1.0 is the standard choice).
 *
 * # Safety
 * `grid` must point to `len` readable doubles and `out` must be valid.
 */
PlcsyncStatus plcsync_estimate(const struct PlcsyncSystem *sys,
                               const double *grid,
                               uintptr_t len,
                               double phi,
                               struct PlcsyncEstimate *out);

/**
 * Checks the noiseless phase-unwrapping feasibility conditions; writes 1
 * into `inside` when (xi, eta) lies in the feasible hexagon.
 *
 * # Safety
 * `sys` and `inside` must be valid pointers.
 */
PlcsyncStatus plcsync_feasibility(const struct PlcsyncSystem *sys,
                                  double xi,
                                  double eta,
                                  int32_t *inside);

/**
 * Closed-form variance/bias/MSE prediction at a timing point and linear
 * SNR (per-subcarrier signal-to-noise power ratio).
 *
 * # Safety
 * `sys` and `out` must be valid pointers.
 */
PlcsyncStatus plcsync_predict(const struct PlcsyncSystem *sys,
                              double xi,
                              double eta,
                              double snr_linear,
                              struct PlcsyncPrediction *out);

/**
 * Library version as a static, NUL-terminated string.
 */
const char *plcsync_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLCSYNC_H */
