//! Numerical tolerances shared across modules.
//!
//! `tau_alg` is the threshold for algebraic predicates (Jacobi, unimodularity,
//! integrability, ideal membership). It is absolute on unit-normalized brackets
//! and may be overridden process-wide, e.g. from the `LIECURVE_TOL` environment
//! variable in the CLI.

use std::sync::atomic::{AtomicU64, Ordering};

/// Default threshold for algebraic predicates.
pub const TAU_ALG_DEFAULT: f64 = 1e-9;

/// Relative singular-value cutoff for kernel extraction.
pub const SVD_KERNEL_REL: f64 = 1e-8;

/// Eigenvalue ratio below which a metric counts as degenerate.
pub const DEGENERATE_RATIO: f64 = 1e-12;

/// Relative residual separating a soliton certificate from a failure.
pub const TOL_SOL: f64 = 1e-7;

/// Fixed-point residual for convergence of the normalized bracket flow.
pub const TOL_FIX: f64 = 1e-8;

/// Number of consecutive accepted steps the fixed-point residual must stay
/// below [`TOL_FIX`] before convergence is declared.
pub const CONVERGENCE_DWELL: usize = 50;

/// Number of trailing accepted steps used by the blow-up time fit.
pub const SINGULARITY_FIT_WINDOW: usize = 20;

/// Environment variable read by the CLI to override [`tau_alg`].
pub const TOL_ENV_VAR: &str = "LIECURVE_TOL";

static TAU_ALG_BITS: AtomicU64 = AtomicU64::new(0);

/// Current algebraic tolerance.
pub fn tau_alg() -> f64 {
    let bits = TAU_ALG_BITS.load(Ordering::Relaxed);
    if bits == 0 {
        TAU_ALG_DEFAULT
    } else {
        f64::from_bits(bits)
    }
}

/// Override the algebraic tolerance for the whole process. Non-positive or
/// non-finite values restore the default.
pub fn set_tau_alg(value: f64) {
    let bits = if value.is_finite() && value > 0.0 {
        value.to_bits()
    } else {
        0
    };
    TAU_ALG_BITS.store(bits, Ordering::Relaxed);
}
