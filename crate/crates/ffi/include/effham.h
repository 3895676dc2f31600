#ifndef EFFHAM_H
#define EFFHAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum EffhamStatus {
  EFFHAM_STATUS_OK = 0,
  EFFHAM_STATUS_NULL_POINTER = 1,
  EFFHAM_STATUS_INVALID_ARGUMENT = 2,
  EFFHAM_STATUS_HERMITICITY_VIOLATION = 3,
  EFFHAM_STATUS_INDEX_OUT_OF_RANGE = 4,
  EFFHAM_STATUS_DIMENSION_MISMATCH = 5,
  EFFHAM_STATUS_ZERO_COUPLING = 6,
  EFFHAM_STATUS_OVERLAPPING_PAIRS = 7,
  EFFHAM_STATUS_UNITARY_DRIFT = 8,
  EFFHAM_STATUS_NON_FINITE = 9,
  EFFHAM_STATUS_GRID_MISMATCH = 10,
  EFFHAM_STATUS_INVALID_GRID = 11,
  EFFHAM_STATUS_NORM_DRIFT = 12,
  EFFHAM_STATUS_TRUNCATION_TOO_SMALL = 13,
  EFFHAM_STATUS_CHAIN_TOO_LARGE = 14,
  EFFHAM_STATUS_OUT_OF_MEMORY = 15,
  EFFHAM_STATUS_PARSE = 16,
  EFFHAM_STATUS_IO = 17,
  EFFHAM_STATUS_BUFFER_TOO_SMALL = 18,
  EFFHAM_STATUS_PANIC = 19,
} EffhamStatus;

/**
 * Magnus evolver handle: controlled Hamiltonian plus its current pulse.
 */
typedef struct EffhamEvolver EffhamEvolver;

/**
 * NPAD state handle: the partially diagonalized operator and its history.
 */
typedef struct EffhamNpad EffhamNpad;

/**
 * Hermitian operator handle.
 */
typedef struct EffhamOperator EffhamOperator;

typedef struct EffhamComplex {
  double re;
  double im;
} EffhamComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to `len` bytes. Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null with `len == 0`.
 */
size_t effham_last_error_message(char *buf, size_t len);

/**
 * Builds an operator from a row-major `dim x dim` array. The input must be
 * Hermitian within a relative tolerance of 1e-12.
 *
 * # Safety
 * `data` must point to `dim * dim` values; `out` must be writable.
 */
enum EffhamStatus effham_operator_from_dense(size_t dim,
                                             const struct EffhamComplex *data,
                                             struct EffhamOperator **out);

/**
 * Builds a sparse operator from `nnz` coordinate entries; duplicates are
 * summed.
 *
 * # Safety
 * `rows`, `cols` and `values` must each point to `nnz` elements.
 */
enum EffhamStatus effham_operator_from_triplets(size_t dim,
                                                size_t nnz,
                                                const size_t *rows,
                                                const size_t *cols,
                                                const struct EffhamComplex *values,
                                                struct EffhamOperator **out);

/**
 * # Safety
 * `op` must come from this library and not be used afterwards.
 */
void effham_operator_free(struct EffhamOperator *op);

/**
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
enum EffhamStatus effham_operator_dim(const struct EffhamOperator *op, size_t *out);

/**
 * Entry `(row, col)`.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
enum EffhamStatus effham_operator_get(const struct EffhamOperator *op,
                                      size_t row,
                                      size_t col,
                                      struct EffhamComplex *out);

/**
 * Real diagonal into `out[0..dim]`.
 *
 * # Safety
 * `op` must be a live handle; `out` must point to `len` writable values.
 */
enum EffhamStatus effham_operator_diagonal(const struct EffhamOperator *op,
                                           double *out,
                                           size_t len);

/**
 * Writes `exp(-i H)` row-major into `out[0..dim*dim]`.
 *
 * # Safety
 * `op` must be a live handle; `out` must point to `len` writable values.
 */
enum EffhamStatus effham_expm_unitary(const struct EffhamOperator *op,
                                      struct EffhamComplex *out,
                                      size_t len);

/**
 * Starts NPAD on a copy of `op`. With `track_unitary` set the
 * accumulated rotation is kept as a dense matrix.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
enum EffhamStatus effham_npad_new(const struct EffhamOperator *op,
                                  bool track_unitary,
                                  struct EffhamNpad **out);

/**
 * # Safety
 * `state` must come from this library and not be used afterwards.
 */
void effham_npad_free(struct EffhamNpad *state);

/**
 * Rotates away the coupling between `i < j`.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum EffhamStatus effham_npad_eliminate_coupling(struct EffhamNpad *state, size_t i, size_t j);

/**
 * Eliminates `count` index-disjoint couplings given as `pairs[2k], pairs[2k+1]`.
 *
 * # Safety
 * `state` must be a live handle; `pairs` must point to `2 * count` indices.
 */
enum EffhamStatus effham_npad_eliminate_couplings(struct EffhamNpad *state,
                                                  const size_t *pairs,
                                                  size_t count);

/**
 * Runs NPAD on a copy of `op` until the relevant couplings fall below
 * `tol * max|H|`. With `subspace_len == 0` every coupling counts; otherwise
 * only couplings between `subspace` and its complement. `max_iter == 0`
 * picks the default budget. The resulting state is returned even when the
 * budget runs out; check `converged`.
 *
 * # Safety
 * Pointers must be valid for the given lengths; outputs must be writable.
 */
enum EffhamStatus effham_npad_run(const struct EffhamOperator *op,
                                  const size_t *subspace,
                                  size_t subspace_len,
                                  double tol,
                                  size_t max_iter,
                                  struct EffhamNpad **out_state,
                                  bool *converged,
                                  size_t *iterations);

/**
 * Copy of the current operator as a new handle.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum EffhamStatus effham_npad_current(const struct EffhamNpad *state, struct EffhamOperator **out);

/**
 * Accumulated unitary, row-major, when tracking is on.
 *
 * # Safety
 * `state` must be a live handle; `out` must point to `len` writable values.
 */
enum EffhamStatus effham_npad_unitary(const struct EffhamNpad *state,
                                      struct EffhamComplex *out,
                                      size_t len);

/**
 * Magnus evolver for `drift + sum_k u_k(t) controls[k]`. `signals` holds
 * `num_controls` rows of `samples` values on a uniform grid over
 * `[t_start, t_end]`. Operators are copied.
 *
 * # Safety
 * `drift` and each `controls[k]` must be live handles; `signals` must hold
 * `num_controls * samples` values.
 */
enum EffhamStatus effham_evolver_new(const struct EffhamOperator *drift,
                                     const struct EffhamOperator *const *controls,
                                     size_t num_controls,
                                     double t_start,
                                     double t_end,
                                     size_t samples,
                                     const double *signals,
                                     struct EffhamEvolver **out);

/**
 * # Safety
 * `ev` must come from this library and not be used afterwards.
 */
void effham_evolver_free(struct EffhamEvolver *ev);

/**
 * Replaces the pulse; same layout as in [`effham_evolver_new`].
 *
 * # Safety
 * `ev` must be a live handle; `signals` must hold `K * samples` values.
 */
enum EffhamStatus effham_evolver_update_controls(struct EffhamEvolver *ev,
                                                 double t_start,
                                                 double t_end,
                                                 size_t samples,
                                                 const double *signals);

/**
 * Evolves the normalized `psi0[0..dim]` through `intervals` Magnus
 * intervals and writes the final state to `out[0..dim]`.
 *
 * # Safety
 * `ev` must be a live handle; `psi0` and `out` must each hold `dim` values.
 */
enum EffhamStatus effham_evolver_evolve(const struct EffhamEvolver *ev,
                                        size_t intervals,
                                        const struct EffhamComplex *psi0,
                                        size_t dim,
                                        struct EffhamComplex *out);

/**
 * Mott-lobe boundary `(mu* - omega) / g` between lobes `n` and `n + 1`
 * from NPAD on the on-site JC Hamiltonian.
 *
 * # Safety
 * `out` must be writable.
 */
enum EffhamStatus effham_mott_boundary_npad(double omega,
                                            double epsilon,
                                            double g,
                                            size_t n_max,
                                            size_t n,
                                            double *out);

/**
 * Closed-form boundary for comparison.
 *
 * # Safety
 * `out` must be writable.
 */
enum EffhamStatus effham_mott_boundary_analytic(size_t n, double detuning_over_g, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EFFHAM_H */
