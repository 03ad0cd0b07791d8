#ifndef GAUSS_RELIABILITY_H
#define GAUSS_RELIABILITY_H

#include <stddef.h>
#include <stdint.h>

typedef enum {
  GR_STATUS_OK = 0,
  GR_STATUS_NULL_POINTER = 1,
  GR_STATUS_DOMAIN = 2,
  GR_STATUS_NO_BRACKET = 3,
  GR_STATUS_NO_CONVERGENCE = 4,
  GR_STATUS_ACCURACY_REGIME = 5,
  GR_STATUS_VACUOUS = 6,
  GR_STATUS_OVERFLOW = 7,
  GR_STATUS_EMPTY_SUPPORT = 8,
  GR_STATUS_INVALID_CODE = 9,
  GR_STATUS_OUT_OF_RANGE = 10,
  GR_STATUS_PANIC = 11,
} GrStatus;

typedef enum {
  GR_CODE_KIND_RANDOM = 0,
  GR_CODE_KIND_SIMPLEX = 1,
  GR_CODE_KIND_BIORTHOGONAL = 2,
  GR_CODE_KIND_PAIR = 3,
} GrCodeKind;

typedef enum {
  GR_BOUND_KIND_UPPER_T1 = 0,
  GR_BOUND_KIND_UPPER_T2 = 1,
  GR_BOUND_KIND_LOWER = 2,
  GR_BOUND_KIND_SPHERE_PACKING = 3,
  GR_BOUND_KIND_STRAIGHT_LINE = 4,
  GR_BOUND_KIND_EXACT = 5,
} GrBoundKind;

/**
 * Opaque spherical code.
 */
typedef struct GrCode GrCode;

/**
 * Opaque sampled bound curve.
 */
typedef struct GrCurve GrCurve;

typedef struct {
  double a;
  double capacity;
  double r_crit;
  double r_bar1;
  double r_bar2;
  double r_bar3;
  double r_low;
  double tau_bar1;
  double t_bar1;
  double t_bar2;
  double tau_bar2;
  double a_const;
  double a0;
} GrThresholds;

typedef struct {
  double p_e_hat;
  double half_width;
  uint64_t errors;
  uint64_t trials;
} GrDecodingEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *gr_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gr_version(void);

/**
 * # Safety
 * `out` must be valid for a write of one `GrThresholds`.
 */
GrStatus gr_thresholds(double a, GrThresholds *out);

/**
 * Sphere-packing exponent at rate `r`.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_e_sp(double a, double r, double *out);

/**
 * Parametric rate `(1+t)ln(1+t) − t ln t`.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_rate_of_t(double t, double *out);

/**
 * Inverse of `gr_rate_of_t`.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_t_of_rate(double r, double *out);

/**
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_j_spectrum(double t, double rho, double *out);

/**
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_upper_bound_t1(double a, double r, double *out);

/**
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_upper_bound_t2(double a, double r, double *out);

/**
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_lower_bound(double a, double r, double *out);

/**
 * Direct numeric solution of the min-max problem.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_minmax_numeric(double a, double r, double *out);

/**
 * Natural log of the area of a cap of half-angle `theta` on the unit sphere in `R^n`.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_cap_area_log(size_t n, double theta, double *out);

/**
 * Rankin bound on the size of a code with minimum angle `2 phi`.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_rankin_bound(size_t n, double phi, double *out);

/**
 * Log of the cardinality bound for codes with maximum correlation `mu`.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
GrStatus gr_cardinality_bound_log(size_t n, double mu, double *out);

/**
 * Generates a code; `rho` is used only by `Pair`.
 *
 * # Safety
 * `out` must be valid for a write of one pointer. The result must be
 * released with `gr_code_free`.
 */
GrStatus gr_code_new(GrCodeKind kind,
                     size_t n,
                     size_t m,
                     double a,
                     double rho,
                     uint64_t seed,
                     GrCode **out);

/**
 * # Safety
 * `code` must come from `gr_code_new` and not have been freed. Null is ignored.
 */
void gr_code_free(GrCode *code);

/**
 * # Safety
 * `code` must be a live handle or null.
 */
size_t gr_code_size(const GrCode *code);

/**
 * # Safety
 * `code` must be a live handle or null.
 */
size_t gr_code_dim(const GrCode *code);

/**
 * Copies codeword `index` (length `gr_code_dim`) into `buf`.
 *
 * # Safety
 * `code` must be a live handle; `buf` must hold `len` doubles.
 */
GrStatus gr_code_codeword(const GrCode *code, size_t index, double *buf, size_t len);

/**
 * Monte Carlo estimate of the ML decoding error probability.
 *
 * # Safety
 * `code` must be a live handle; `out` valid for one write.
 */
GrStatus gr_code_decode_mc(const GrCode *code,
                           uint64_t trials,
                           uint64_t seed,
                           GrDecodingEstimate *out);

/**
 * Samples a bound on `count` equally spaced rates in `[rmin, rmax]`.
 * Some kinds skip rates where they are undefined; use `gr_curve_len`.
 *
 * # Safety
 * `out` must be valid for one pointer write. Release with `gr_curve_free`.
 */
GrStatus gr_curve_new(GrBoundKind kind,
                      double a,
                      double rmin,
                      double rmax,
                      size_t count,
                      GrCurve **out);

/**
 * # Safety
 * `curve` must come from `gr_curve_new` and not have been freed. Null is ignored.
 */
void gr_curve_free(GrCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle or null.
 */
size_t gr_curve_len(const GrCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle; `rate` and `value` valid for one write each.
 */
GrStatus gr_curve_get(const GrCurve *curve, size_t index, double *rate, double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAUSS_RELIABILITY_H */
