#ifndef CARDYLAB_H
#define CARDYLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CardyStatus {
  CARDY_STATUS_OK = 0,
  CARDY_STATUS_NULL_POINTER = 1,
  CARDY_STATUS_INVALID_ARGUMENT = 2,
  CARDY_STATUS_DOMAIN_ERROR = 3,
  CARDY_STATUS_COUPLING_MISMATCH = 4,
  CARDY_STATUS_PANIC = 5,
} CardyStatus;

typedef enum CardyFamily {
  CARDY_FAMILY_SQUARE = 0,
  CARDY_FAMILY_TRIANGULAR = 1,
  CARDY_FAMILY_SQUARE_NE = 2,
  CARDY_FAMILY_TRI_NE = 3,
  CARDY_FAMILY_TRI_NW = 4,
  CARDY_FAMILY_TRI_H = 5,
} CardyFamily;

// Opaque handle to the in-domain sites of a marked triangle.
typedef struct CardyClassification CardyClassification;

typedef struct CardyDomainSummary {
  uint64_t in_domain;
  uint64_t interior;
  uint64_t ax;
  uint64_t xb;
  uint64_t bc;
  uint64_t ca;
  double x_requested;
  double x_snapped;
} CardyDomainSummary;

typedef struct CardyEstimate {
  uint64_t n;
  uint64_t successes;
  double p_hat;
  // 95% Wilson interval.
  double ci_low;
  double ci_high;
} CardyEstimate;

typedef struct CardyPrediction {
  double x;
  double kappa;
  double w;
  double big_x;
} CardyPrediction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread ("" after success).
// Valid until the next call into this library from the same thread.
const char *cardy_last_error(void);

// Classifies the sites of `family` (mesh `delta`; `k` is used only by the
// triangular family) inside its standard triangle with the marked point at
// fraction `x` of the base.
//
// # Safety
// `out` must be valid for writes.
enum CardyStatus cardy_classification_new(enum CardyFamily family,
                                          double k,
                                          double delta,
                                          double x,
                                          struct CardyClassification **out);

// Re-indexes a `SquareNe` classification onto the triangular lattice it
// rotates to, so it can be coupled with triangular classifications.
//
// # Safety
// `src` must be a live handle or null; `out` must be valid for writes.
enum CardyStatus cardy_classification_rotated(const struct CardyClassification *src,
                                              struct CardyClassification **out);

// # Safety
// `cls` must be null or a handle not yet freed.
void cardy_classification_free(struct CardyClassification *cls);

// # Safety
// `cls` must be a live handle or null; `out` must be valid for writes.
enum CardyStatus cardy_classification_summary(const struct CardyClassification *cls,
                                              struct CardyDomainSummary *out);

// Monte Carlo estimate of the crossing probability from `ax` to `bc`.
//
// # Safety
// `cls` must be a live handle or null; `out` must be valid for writes.
enum CardyStatus cardy_estimate(const struct CardyClassification *cls,
                                double p,
                                uint64_t seed,
                                uint64_t n_samples,
                                struct CardyEstimate *out);

// Runs two classifications on shared site marks and counts the samples
// in which their crossing indicators agree. Fails with
// `CouplingMismatch` unless both describe the same indexed graph.
//
// # Safety
// `a`, `b` must be live handles or null; `agreement` must be valid for
// writes; `est_a`, `est_b` may be null.
enum CardyStatus cardy_coupled_estimate(const struct CardyClassification *a,
                                        const struct CardyClassification *b,
                                        double p,
                                        uint64_t seed,
                                        uint64_t n_samples,
                                        uint64_t *agreement,
                                        struct CardyEstimate *est_a,
                                        struct CardyEstimate *est_b);

// Regularized incomplete beta I_w(a, a).
//
// # Safety
// `out` must be valid for writes.
enum CardyStatus cardy_reg_inc_beta(double w, double a, double *out);

// The w in [0, 1] with I_w(a, a) = x.
//
// # Safety
// `out` must be valid for writes.
enum CardyStatus cardy_inv_reg_inc_beta(double x, double a, double *out);

// Base angle of the unit-base triangle of the triangular family with shape k.
//
// # Safety
// `out` must be valid for writes.
enum CardyStatus cardy_apex_angle(double k, double *out);

// Ratio of the triangle map's derivative to the equilateral one at w.
//
// # Safety
// `out` must be valid for writes.
enum CardyStatus cardy_derivative_ratio(double w, double kappa, double *out);

// Conformal prediction for marked point `x` in the triangle with base
// angle `kappa`.
//
// # Safety
// `out` must be valid for writes.
enum CardyStatus cardy_prediction(double x, double kappa, struct CardyPrediction *out);

// Static description of a status code.
const char *cardy_status_str(enum CardyStatus status);

// Version of the per-site random stream; outputs are reproducible only
// between equal versions.
uint32_t cardy_site_stream_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CARDYLAB_H */
