#ifndef LIECURVE_H
#define LIECURVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum LcStatus {
  LC_STATUS_OK = 0,
  LC_STATUS_NULL_POINTER = 1,
  LC_STATUS_INVALID_ARGUMENT = 2,
  // Input parsing failed (JSON, UTF-8, catalog names).
  LC_STATUS_PARSE = 3,
  // The algebra or complex structure fails a structural requirement.
  LC_STATUS_ALGEBRA = 4,
  // Metric not positive definite, singular matrix or non-finite values.
  LC_STATUS_NUMERICAL = 5,
  // A theorem's hypothesis does not hold for the input.
  LC_STATUS_HYPOTHESIS = 6,
  LC_STATUS_IO = 7,
  // A Rust panic was caught at the boundary.
  LC_STATUS_PANIC = 8,
} LcStatus;

// Curvature operator for soliton certificates.
typedef enum LcOperator {
  LC_OPERATOR_HCF = 0,
  // `K^x`; the caller passes `x`.
  LC_OPERATOR_KX = 1,
  LC_OPERATOR_M = 2,
} LcOperator;

typedef enum LcFlowKind {
  LC_FLOW_KIND_HCF = 0,
  LC_FLOW_KIND_KX = 1,
  LC_FLOW_KIND_M_FLOW = 2,
  LC_FLOW_KIND_RIC11 = 3,
  LC_FLOW_KIND_BRACKET = 4,
  LC_FLOW_KIND_NORMALIZED_BRACKET = 5,
} LcFlowKind;

typedef enum LcTerminationKind {
  LC_TERMINATION_KIND_REACHED_HORIZON = 0,
  LC_TERMINATION_KIND_SINGULARITY = 1,
  LC_TERMINATION_KIND_CONVERGED = 2,
  LC_TERMINATION_KIND_STEP_LIMIT = 3,
} LcTerminationKind;

// Opaque Lie algebra with optional complex structure.
typedef struct LcAlgebra LcAlgebra;

// Opaque flow trace.
typedef struct LcTrace LcTrace;

// How a flow ended. `t_est`/`t_err` are set for singularities, `t_est` is
// the convergence time for converged runs, `last_t` is always set.
typedef struct LcTermination {
  enum LcTerminationKind kind;
  double t_est;
  double t_err;
  double last_t;
} LcTermination;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null when there is
// none. Release with [`lc_string_free`].
char *lc_last_error_message(void);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void lc_string_free(char *s);

// Load a catalog entry (`sl2c`, `h3c`, `s3lambda:-1`, `abelian:4`, ...).
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum LcStatus lc_algebra_from_catalog(const char *name, struct LcAlgebra **out);

// Parse an algebra from its JSON description.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum LcStatus lc_algebra_from_json(const char *text, struct LcAlgebra **out);

// # Safety
// `alg` must come from this library and not have been freed. Null is ignored.
void lc_algebra_free(struct LcAlgebra *alg);

// Real dimension, 0 for null.
//
// # Safety
// `alg` must be null or a live handle.
size_t lc_algebra_real_dim(const struct LcAlgebra *alg);

// Complex dimension, 0 for null or without a complex structure.
//
// # Safety
// `alg` must be null or a live handle.
size_t lc_algebra_complex_dim(const struct LcAlgebra *alg);

// HCF tensor `K(Z_a, Zbar_b)` in the reference frame at the Hermitian
// metric `h`, all `n x n` row-major.
//
// # Safety
// The four arrays must hold `n * n` doubles each.
enum LcStatus lc_hcf_tensor(const struct LcAlgebra *alg,
                            const double *h_re,
                            const double *h_im,
                            size_t n,
                            double *out_re,
                            double *out_im);

// Curvature report (unitary-frame tensors, torsion, Lee form, scalars) as
// JSON. `x` may be null for the HCF coefficients.
//
// # Safety
// `h_re`/`h_im` hold `n * n` doubles, `x` is null or holds 4, `out` is writable.
enum LcStatus lc_curvature_report_json(const struct LcAlgebra *alg,
                                       const double *h_re,
                                       const double *h_im,
                                       size_t n,
                                       const double *x,
                                       char **out);

// Soliton certificate as JSON for the real metric `g` (`dim x dim`,
// row-major, `dim` the real dimension). `x` is read only for `Kx`.
//
// # Safety
// `g` holds `dim * dim` doubles, `x` holds 4 when used, `out` is writable.
enum LcStatus lc_soliton_json(const struct LcAlgebra *alg,
                              const double *g,
                              size_t dim,
                              enum LcOperator op,
                              const double *x,
                              char **out);

// Integrate a flow from the real metric `g` (`dim x dim`, row-major) up to
// `t_end`. `x` is read only for `Kx`.
//
// # Safety
// `g` holds `dim * dim` doubles, `x` holds 4 when used, `out` is writable.
enum LcStatus lc_flow_run(const struct LcAlgebra *alg,
                          const double *g,
                          size_t dim,
                          enum LcFlowKind kind,
                          const double *x,
                          double t_end,
                          struct LcTrace **out);

// # Safety
// `tr` must come from this library and not have been freed. Null is ignored.
void lc_trace_free(struct LcTrace *tr);

// Number of samples, 0 for null.
//
// # Safety
// `tr` must be null or a live handle.
size_t lc_trace_len(const struct LcTrace *tr);

// Length of each state vector, 0 for null.
//
// # Safety
// `tr` must be null or a live handle.
size_t lc_trace_state_len(const struct LcTrace *tr);

// Time of sample `i`; NaN when out of range.
//
// # Safety
// `tr` must be null or a live handle.
double lc_trace_time(const struct LcTrace *tr, size_t i);

// Copy the state of sample `i` into `out` (capacity `len`).
//
// # Safety
// `out` must hold `len` doubles.
enum LcStatus lc_trace_state(const struct LcTrace *tr, size_t i, double *out, size_t len);

// # Safety
// `out` must be writable.
enum LcStatus lc_trace_termination(const struct LcTrace *tr, struct LcTermination *out);

// The trace as CSV text.
//
// # Safety
// `out` must be writable.
enum LcStatus lc_trace_csv(const struct LcTrace *tr, char **out);

// Library version, static storage.
const char *lc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIECURVE_H */
