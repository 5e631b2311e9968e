#ifndef PRODSPEC_H
#define PRODSPEC_H

/* Generated by cbindgen from the prodspec-ffi crate; edit the Rust source, not this file. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible entry point.
typedef enum PsStatus {
  // Success; all requested outputs were written.
  PS_STATUS_OK = 0,
  // Input rejected before evaluation (domain, validation, or a source
  // construction that the requested route cannot handle).
  PS_STATUS_INVALID_ARGUMENT = 1,
  // Evaluation started but did not produce a trusted value
  // (non-convergence, geometry failure, or a caught panic).
  PS_STATUS_NUMERIC_FAILURE = 2,
  // A required pointer was NULL.
  PS_STATUS_NULL_POINTER = 3,
} PsStatus;

// Opaque ensemble handle: matrix size n, factor shape ν_1..ν_M, and the
// n source eigenvalues. Create with [`ps_ensemble_new`], release with
// [`ps_ensemble_free`].
typedef struct PsEnsemble PsEnsemble;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ps_version(void);

// Copies the current thread's last error message into `buf` (truncated
// to `cap` bytes including the NUL terminator) and returns the full
// message length in bytes. `buf` may be NULL to query the length.
size_t ps_last_error(char *buf, size_t cap);

// Creates an ensemble handle for matrix size `n`, factor shape
// `nus[0..nus_len]` (`nus_len` = M; both may be empty for M = 0), and
// source eigenvalues `b[0..b_len]` (`b_len` must equal `n`). On success
// writes the handle to `*out`.
enum PsStatus ps_ensemble_new(size_t n,
                              const uint32_t *nus,
                              size_t nus_len,
                              const double *b,
                              size_t b_len,
                              struct PsEnsemble **out);

// Releases an ensemble handle. NULL is a no-op.
void ps_ensemble_free(struct PsEnsemble *ens);

// Matrix size of the ensemble (the number of eigenvalues each sample
// yields); 0 for a NULL handle.
size_t ps_ensemble_n(const struct PsEnsemble *ens);

// Finite-n kernel K_n(x, y) via the double-contour route (any source,
// any n). Writes the value and, when `abs_err` is non-NULL, the error
// estimate.
enum PsStatus ps_kernel_contour(const struct PsEnsemble *ens,
                                double x,
                                double y,
                                double *value,
                                double *abs_err);

// Finite-n kernel K_n(x, y) via biorthogonal inversion (distinct source
// eigenvalues, n ≤ 12, y ≠ 0).
enum PsStatus ps_kernel_biortho(const struct PsEnsemble *ens,
                                double x,
                                double y,
                                double *value,
                                double *abs_err);

// Limiting kernel at the origin in the subcritical regime (hard-edge
// Meijer-G form; the M = 0 case is the sine kernel).
enum PsStatus ps_limit_subcritical(const uint32_t *nus,
                                   size_t nus_len,
                                   double x,
                                   double y,
                                   double *value,
                                   double *abs_err);

// Limiting kernel at the critical coupling: Pearcey-type double
// integral with transition parameter `tau` and `spikes_len` spike
// locations of which the first `p0` are negative.
enum PsStatus ps_limit_critical(const uint32_t *nus,
                                size_t nus_len,
                                double tau,
                                const double *spikes,
                                size_t spikes_len,
                                size_t p0,
                                double x,
                                double y,
                                double *value,
                                double *abs_err);

// Limiting kernel in the supercritical regime: rank-`spikes_len`
// perturbation of the Gaussian factor at coupling `a` > 1.
enum PsStatus ps_limit_supercritical(const uint32_t *nus,
                                     size_t nus_len,
                                     double a,
                                     const double *spikes,
                                     size_t spikes_len,
                                     double x,
                                     double y,
                                     double *value,
                                     double *abs_err);

// Global limiting density in parametric form for M = `m` product
// factors. `a` selects the branch and must be exactly 0.0 or 1.0 (the
// two couplings with closed parametrisations). Evaluates the curve at
// `phis[0..len]` and writes abscissae to `xs_out` and densities to
// `rhos_out`, each with room for `len` values.
enum PsStatus ps_density_parametric(size_t m,
                                    double a,
                                    const double *phis,
                                    size_t len,
                                    double *xs_out,
                                    double *rhos_out);

// Draws sample `sample_index` of the run keyed by `seed` and writes the
// ascending eigenvalues to `eigs_out` (room for [`ps_ensemble_n`]
// values). The same (seed, index) pair always yields the same spectrum.
enum PsStatus ps_sample_spectrum(const struct PsEnsemble *ens,
                                 uint64_t seed,
                                 size_t sample_index,
                                 double *eigs_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRODSPEC_H */
