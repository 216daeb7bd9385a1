#ifndef GEOMQ_H
#define GEOMQ_H

/* Generated by cbindgen from geomq-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes returned by every fallible function.
typedef enum GeomqStatus {
  GEOMQ_STATUS_OK = 0,
  GEOMQ_STATUS_NULL_POINTER = 1,
  GEOMQ_STATUS_DIMENSION_MISMATCH = 2,
  GEOMQ_STATUS_NOT_HERMITIAN = 3,
  GEOMQ_STATUS_NOT_A_STATE = 4,
  GEOMQ_STATUS_INVALID_ARGUMENT = 5,
  GEOMQ_STATUS_INVARIANT_VIOLATION = 6,
  GEOMQ_STATUS_NUMERICAL = 7,
  GEOMQ_STATUS_BUFFER_TOO_SMALL = 8,
  GEOMQ_STATUS_PANIC = 9,
} GeomqStatus;

// Opaque square complex matrix.
typedef struct GeomqOperator GeomqOperator;

// Opaque recorded trajectory of density matrices.
typedef struct GeomqTrajectory GeomqTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static nul-terminated string.
const char *geomq_version(void);

// Message for the last failed call on this thread, or null. Valid until the
// next call into the library on the same thread.
const char *geomq_last_error_message(void);

// Builds an `n×n` operator from `2·n·n` interleaved row-major values.
//
// # Safety
// `data` must point to `2·dim·dim` readable doubles and `out` must be writable.
enum GeomqStatus geomq_operator_new(const double *data, size_t dim, struct GeomqOperator **out);

// Pauli matrix `j ∈ {0, 1, 2, 3}` (0 is the identity).
//
// # Safety
// `out` must be writable.
enum GeomqStatus geomq_operator_pauli(uint32_t j, struct GeomqOperator **out);

// # Safety
// `op` must be null or a handle from this library not yet freed.
void geomq_operator_free(struct GeomqOperator *op);

// Dimension of the operator, or 0 for a null handle.
//
// # Safety
// `op` must be null or a valid handle.
size_t geomq_operator_dim(const struct GeomqOperator *op);

// Copies the entries into `out` (interleaved, row-major); `len` counts doubles.
//
// # Safety
// `op` must be a valid handle and `out` must have room for `len` doubles.
enum GeomqStatus geomq_operator_entries(const struct GeomqOperator *op, double *out, size_t len);

// `[a, b] = ab − ba`.
//
// # Safety
// Handles must be valid and `out` writable.
enum GeomqStatus geomq_commutator(const struct GeomqOperator *a,
                                  const struct GeomqOperator *b,
                                  struct GeomqOperator **out);

// Jordan product `(ab + ba)/2` of Hermitian operators.
//
// # Safety
// Handles must be valid and `out` writable.
enum GeomqStatus geomq_jordan_product(const struct GeomqOperator *a,
                                      const struct GeomqOperator *b,
                                      struct GeomqOperator **out);

// Kronecker product `a ⊗ b`.
//
// # Safety
// Handles must be valid and `out` writable.
enum GeomqStatus geomq_tensor_product(const struct GeomqOperator *a,
                                      const struct GeomqOperator *b,
                                      struct GeomqOperator **out);

// Reduced state on subsystem A (`keep = 0`) or B (`keep = 1`).
//
// # Safety
// `rho` must be valid and `out` writable.
enum GeomqStatus geomq_partial_trace(const struct GeomqOperator *rho,
                                     size_t dim_a,
                                     size_t dim_b,
                                     uint32_t keep,
                                     struct GeomqOperator **out);

// Eigenvalues of a Hermitian operator in descending order; `len ≥ dim`.
//
// # Safety
// `a` must be valid and `out` must have room for `len` doubles.
enum GeomqStatus geomq_eigenvalues(const struct GeomqOperator *a, double *out, size_t len);

// `Tr(ρ a)`.
//
// # Safety
// Handles must be valid and `out` writable.
enum GeomqStatus geomq_expectation(const struct GeomqOperator *rho,
                                   const struct GeomqOperator *a,
                                   double *out);

// Generator of the Poisson bracket of `e_a` and `e_b`: `[a, b]/(2i)` for
// `convention = 0`, `i[a, b]` for `convention = 1`.
//
// # Safety
// Handles must be valid and `out` writable.
enum GeomqStatus geomq_poisson_bracket(const struct GeomqOperator *a,
                                       const struct GeomqOperator *b,
                                       uint32_t convention,
                                       struct GeomqOperator **out);

// `|⟨ψ|φ⟩|²` for the rays of two nonzero vectors of `dim` interleaved entries.
//
// # Safety
// `psi` and `phi` must each point to `2·dim` doubles; `out` must be writable.
enum GeomqStatus geomq_transition_probability(const double *psi,
                                              const double *phi,
                                              size_t dim,
                                              double *out);

// `L(ρ)` for the GKLS generator with Hamiltonian `h` and `n_jumps` jump operators.
//
// # Safety
// All handles must be valid, `jumps` must hold `n_jumps` handles, `out` writable.
enum GeomqStatus geomq_gkls_apply(const struct GeomqOperator *h,
                                  const struct GeomqOperator *const *jumps,
                                  size_t n_jumps,
                                  const struct GeomqOperator *rho,
                                  struct GeomqOperator **out);

// Frobenius residual of the nonlinear decomposition of `L(ρ)`.
//
// # Safety
// As for [`geomq_gkls_apply`]; `out` must be writable.
enum GeomqStatus geomq_cancellation_check(const struct GeomqOperator *h,
                                          const struct GeomqOperator *const *jumps,
                                          size_t n_jumps,
                                          const struct GeomqOperator *rho,
                                          double *out);

// Integrates `ρ̇ = L(ρ)` from `rho0`. `integrator` is 0 for Runge-Kutta 4,
// 1 for exact unitary conjugation (closed systems only).
//
// # Safety
// As for [`geomq_gkls_apply`]; `out` must be writable.
enum GeomqStatus geomq_integrate(const struct GeomqOperator *h,
                                 const struct GeomqOperator *const *jumps,
                                 size_t n_jumps,
                                 const struct GeomqOperator *rho0,
                                 double dt,
                                 double t_final,
                                 size_t record_every,
                                 uint32_t integrator,
                                 struct GeomqTrajectory **out);

// Number of recorded states, or 0 for a null handle.
//
// # Safety
// `traj` must be null or a valid handle.
size_t geomq_trajectory_len(const struct GeomqTrajectory *traj);

// Time and state of record `k`. Either out-pointer may be null to skip it.
//
// # Safety
// `traj` must be valid; non-null out-pointers must be writable.
enum GeomqStatus geomq_trajectory_get(const struct GeomqTrajectory *traj,
                                      size_t k,
                                      double *time,
                                      struct GeomqOperator **rho);

// # Safety
// `traj` must be null or a handle from this library not yet freed.
void geomq_trajectory_free(struct GeomqTrajectory *traj);

// `Tr((ρ − ρ_A ⊗ ρ_B)^k)`, `k ≥ 2`.
//
// # Safety
// `rho` must be valid and `out` writable.
enum GeomqStatus geomq_entanglement_measure(const struct GeomqOperator *rho,
                                            size_t dim_a,
                                            size_t dim_b,
                                            uint32_t k,
                                            double *out);

// Bloch vector of a qubit state into `out[0..3]`.
//
// # Safety
// `rho` must be valid and `out` must have room for 3 doubles.
enum GeomqStatus geomq_bloch_from_state(const struct GeomqOperator *rho, double *out);

// Qubit state `(1 + x·σ)/2` for `x` in the closed unit ball.
//
// # Safety
// `x` must point to 3 doubles and `out` must be writable.
enum GeomqStatus geomq_state_from_bloch(const double *x, struct GeomqOperator **out);

// Monte-Carlo estimate of `∫ e_a e_ρ dν` over Haar-random pure states.
//
// # Safety
// Handles must be valid; `estimate` and `std_error` must be writable.
enum GeomqStatus geomq_pairing_integral(const struct GeomqOperator *rho,
                                        const struct GeomqOperator *a,
                                        size_t n_samples,
                                        uint64_t seed,
                                        double *estimate,
                                        double *std_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOMQ_H */
