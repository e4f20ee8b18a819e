#ifndef BARRON_GAUGE_H
#define BARRON_GAUGE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by all functions.
typedef enum BgStatus {
  BG_STATUS_OK = 0,
  BG_STATUS_INVALID_ARGUMENT = 1,
  BG_STATUS_DIMENSION_MISMATCH = 2,
  BG_STATUS_NOT_CONVERGED = 3,
  BG_STATUS_NULL_POINTER = 4,
  BG_STATUS_PARSE = 5,
  BG_STATUS_IO = 6,
  BG_STATUS_PANIC = 7,
} BgStatus;

// Compact symmetric domain Ω.
typedef struct BgDomain BgDomain;

// Two-layer network `(1/m) Σ a_j max(w_j·x + b_j, 0)^s`.
typedef struct BgNetwork BgNetwork;

// Spectral Barron upper bound of a network.
typedef struct BgSpectralBound {
  double value;
  double err;
  bool converged;
} BgSpectralBound;

// Weighted spectral moment of one neuron profile.
typedef struct BgMomentEstimate {
  double value;
  double truncation_xi;
  double tail_bound;
  double quad_err;
  bool converged;
} BgMomentEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len - 1` bytes) and returns the full message length.
// Passing `len = 0` queries the length only.
//
// # Safety
// `buf` must point to `len` writable bytes when `len > 0`.
size_t bg_last_error(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *bg_version(void);

// Box `∏ [-h_i, h_i]`.
//
// # Safety
// `halfwidths` must point to `dim` doubles; `out` must be writable.
enum BgStatus bg_domain_box(const double *halfwidths, size_t dim, struct BgDomain **out);

// Euclidean ball of radius `radius` in dimension `dim`.
//
// # Safety
// `out` must be writable.
enum BgStatus bg_domain_ball(double radius, size_t dim, struct BgDomain **out);

// Convex hull of `n` vertices stored row-major (`n × dim`). The vertex
// set must be closed under negation.
//
// # Safety
// `vertices` must point to `n * dim` doubles; `out` must be writable.
enum BgStatus bg_domain_polytope(const double *vertices,
                                 size_t n,
                                 size_t dim,
                                 struct BgDomain **out);

// # Safety
// `dom` must be NULL or a handle from a `bg_domain_*` constructor that has
// not been freed.
void bg_domain_free(struct BgDomain *dom);

// Dimension of the domain, 0 for NULL.
//
// # Safety
// `dom` must be NULL or a live handle.
size_t bg_domain_dim(const struct BgDomain *dom);

// `‖v‖_Ω = sup_{x∈Ω} |v·x|`.
//
// # Safety
// `dom` must be a live handle, `v` must point to `len` doubles and
// `out` must be writable.
enum BgStatus bg_support_norm(const struct BgDomain *dom, const double *v, size_t len, double *out);

// Network with `m` atoms in dimension `dim`: outer weights `a[m]`, inner
// weights `w[m * dim]` row-major, biases `b[m]`.
//
// # Safety
// The arrays must have the stated lengths; `out` must be writable.
enum BgStatus bg_network_new(uint32_t s,
                             size_t dim,
                             size_t m,
                             const double *a,
                             const double *w,
                             const double *b,
                             struct BgNetwork **out);

// Parses a network document
// `{"s": .., "domain": {..}, "atoms": [[a, [w..], b], ..]}` into a network
// and its domain. Both handles are owned by the caller.
//
// # Safety
// `json` must be a NUL-terminated string; both out-pointers must be
// writable.
enum BgStatus bg_network_from_json(const char *json, struct BgNetwork **net, struct BgDomain **dom);

// # Safety
// `net` must be NULL or a live network handle.
void bg_network_free(struct BgNetwork *net);

// Evaluates the network at `x`.
//
// # Safety
// `net` must be a live handle, `x` must point to `len` doubles and `out`
// must be writable.
enum BgStatus bg_network_eval(const struct BgNetwork *net,
                              const double *x,
                              size_t len,
                              double *out);

// Path cost `(1/m) Σ |a_j| (‖w_j‖_Ω + |b_j|)^s`, an upper bound on the
// Barron norm.
//
// # Safety
// Handles must be live and `out` writable.
enum BgStatus bg_barron_cost_upper(const struct BgNetwork *net,
                                   const struct BgDomain *dom,
                                   double *out);

// Upper bound on the spectral Barron norm of order `s - delta`,
// `0 < delta < 1`, computed to relative tolerance `tol`.
//
// # Safety
// Handles must be live and `out` writable.
enum BgStatus bg_spectral_upper(const struct BgNetwork *net,
                                const struct BgDomain *dom,
                                double delta,
                                double tol,
                                struct BgSpectralBound *out);

// The cutoff χ: 1 on `[-1, 1]`, 0 outside `(-2, 2)`, smooth in between.
double bg_chi_eval(double z);

// `(1 - cos ξ) / (π ξ²)`, the transform of the triangular hat.
double bg_ft_triangular(double xi);

// `ĥ(ξ) = (1/2π) ∫ χ(z) max(z+b, 0)^s e^{-iξz} dz`, written as real and
// imaginary parts.
//
// # Safety
// `re` and `im` must be writable.
enum BgStatus bg_ft_profile(uint32_t s,
                            double b,
                            double xi,
                            double rel_tol,
                            double *re,
                            double *im);

// `∫ (1+|v|)^order |ĥ(v)| dv` for the profile with power `s ≥ 1` and
// bias `b`.
//
// # Safety
// `out` must be writable.
enum BgStatus bg_moment_integral(uint32_t s,
                                 double b,
                                 double order,
                                 double tol,
                                 struct BgMomentEstimate *out);

// `S(R) = ∫_{|ξ|≤R} (1+|ξ|) t̂(ξ) dξ` for `R ≥ 1`.
//
// # Safety
// `out` must be writable.
enum BgStatus bg_truncated_triangular_moment(double r, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BARRON_GAUGE_H */
