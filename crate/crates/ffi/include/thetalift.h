#ifndef THETALIFT_H
#define THETALIFT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdint.h>
#include <stddef.h>

// Status codes. Zero is success.
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_POINTER = 1,
  TL_STATUS_INVALID_ARGUMENT = 2,
  TL_STATUS_INVALID_LATTICE = 3,
  TL_STATUS_INVALID_FORM = 4,
  TL_STATUS_INSUFFICIENT_HECKE = 5,
  TL_STATUS_OUT_OF_RANGE = 6,
  TL_STATUS_DOMAIN = 7,
  TL_STATUS_QUADRATURE = 8,
  TL_STATUS_MISSING_NORM = 9,
  TL_STATUS_BUDGET = 10,
  TL_STATUS_CONFIG = 11,
  TL_STATUS_PARSE = 12,
  TL_STATUS_IO = 13,
  TL_STATUS_PANIC = 14,
} TlStatus;

// Opaque Maass form handle.
typedef struct TlForm TlForm;

// Opaque lattice handle.
typedef struct TlLattice TlLattice;

// Opaque lift handle: a lattice and a form ready for evaluation.
typedef struct TlLift TlLift;

// Result of [`tl_lift_evaluate`].
typedef struct TlLiftValue {
  double value_re;
  double value_im;
  // ln of the scale e^{−πr/2}y^{N/2}; value = e^{ln_scale}·mantissa.
  double ln_scale;
  double mantissa_re;
  double mantissa_im;
  uint64_t truncation_m;
  double tail_bound;
} TlLiftValue;

// Message for the last failed call on this thread; empty after a success. The pointer
// stays valid until the next call on the same thread.
const char *tl_last_error(void);

// Library version as a static NUL-terminated string.
const char *tl_version(void);

// Built-in lattice by name: "E8", "E8xE8" or "D16plus".
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum TlStatus tl_lattice_builtin(const char *name, struct TlLattice **out);

// Lattice from JSON text `{"rank": N, "gram": [[...]]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum TlStatus tl_lattice_from_json(const char *json, struct TlLattice **out);

// # Safety
// `lat` must come from this library and not be used afterwards. Null is ignored.
void tl_lattice_free(struct TlLattice *lat);

// Rank of the lattice, or 0 for a null handle.
//
// # Safety
// `lat` must be null or a live handle.
size_t tl_lattice_rank(const struct TlLattice *lat);

// Writes r(1), ..., r(max_norm) to `counts`, which must hold `max_norm` entries.
//
// # Safety
// `lat` must be a live handle and `counts` valid for `max_norm` writes.
enum TlStatus tl_lattice_shell_counts(const struct TlLattice *lat,
                                      uint64_t max_norm,
                                      uint64_t *counts);

// Form from JSON text with fields r, parity, c1, norm_sq and hecke.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum TlStatus tl_form_from_json(const char *json, struct TlForm **out);

// Shipped sample form: "sample-even" or "sample-odd".
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum TlStatus tl_form_sample(const char *name, struct TlForm **out);

// # Safety
// `form` must come from this library and not be used afterwards. Null is ignored.
void tl_form_free(struct TlForm *form);

// Spectral parameter r, or NaN for a null handle.
//
// # Safety
// `form` must be null or a live handle.
double tl_form_r(const struct TlForm *form);

// e^{πr/2}K_{ir}(y).
//
// # Safety
// `out` must be a valid pointer.
enum TlStatus tl_k_scaled(double r, double y, double *out);

// Lift of `form` to `lat` with default options. Both inputs are copied.
//
// # Safety
// `lat` and `form` must be live handles and `out` a valid pointer.
enum TlStatus tl_lift_new(const struct TlLattice *lat,
                          const struct TlForm *form,
                          struct TlLift **out);

// # Safety
// `lift` must come from this library and not be used afterwards. Null is ignored.
void tl_lift_free(struct TlLift *lift);

// F(n(x)a_y) with tail bound ≤ tol·e^{−πr/2}y^{N/2}. `x` holds `n` = rank coordinates.
//
// # Safety
// `lift` must be a live handle, `x` valid for `n` reads and `out` a valid pointer.
enum TlStatus tl_lift_evaluate(const struct TlLift *lift,
                               const double *x,
                               size_t n,
                               double y,
                               double tol,
                               struct TlLiftValue *out);

// ‖F‖²/‖f‖² for rank `rank` with the Euler product over p ≤ primes.
//
// # Safety
// `form` must be a live handle and `out` a valid pointer.
enum TlStatus tl_norm_ratio(const struct TlForm *form, size_t rank, uint64_t primes, double *out);

// Exponents of y₀ in r and of the sup-norm bound in Λ for θ = theta_num/theta_den, as
// reduced fractions.
//
// # Safety
// All output pointers must be valid.
enum TlStatus tl_bound_exponents(size_t rank,
                                 int64_t theta_num,
                                 int64_t theta_den,
                                 int64_t *y0_num,
                                 int64_t *y0_den,
                                 int64_t *sup_num,
                                 int64_t *sup_den);

#endif /* THETALIFT_H */
