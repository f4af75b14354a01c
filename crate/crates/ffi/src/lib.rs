//! C ABI for `liecurve`.
//!
//! Objects cross the boundary as opaque handles (`LcAlgebra`, `LcTrace`) that
//! the caller releases with the matching `*_free` function. Every entry point
//! returns an [`LcStatus`]; on failure the message is available from
//! [`lc_last_error_message`]. Strings returned by the library are owned by the
//! caller and released with [`lc_string_free`]. Matrices are dense row-major
//! `double` arrays; Hermitian matrices are passed as separate real and
//! imaginary parts.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use liecurve::catalog;
use liecurve::flows::{self, FlowKind, FlowProblem, FlowTrace, Termination};
use liecurve::hermitian::{self, HermitianMetric, HCF};
use liecurve::lie::{complexify, json, Algebra};
use liecurve::linalg::{c, CMatrix, RMatrix};
use liecurve::solitons::{self, Operator};
use liecurve::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input parsing failed (JSON, UTF-8, catalog names).
    Parse = 3,
    /// The algebra or complex structure fails a structural requirement.
    Algebra = 4,
    /// Metric not positive definite, singular matrix or non-finite values.
    Numerical = 5,
    /// A theorem's hypothesis does not hold for the input.
    Hypothesis = 6,
    Io = 7,
    /// A Rust panic was caught at the boundary.
    Panic = 8,
}

/// Curvature operator for soliton certificates.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcOperator {
    Hcf = 0,
    /// `K^x`; the caller passes `x`.
    Kx = 1,
    M = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcFlowKind {
    Hcf = 0,
    Kx = 1,
    MFlow = 2,
    Ric11 = 3,
    Bracket = 4,
    NormalizedBracket = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcTerminationKind {
    ReachedHorizon = 0,
    Singularity = 1,
    Converged = 2,
    StepLimit = 3,
}

/// How a flow ended. `t_est`/`t_err` are set for singularities, `t_est` is
/// the convergence time for converged runs, `last_t` is always set.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct LcTermination {
    pub kind: LcTerminationKind,
    pub t_est: f64,
    pub t_err: f64,
    pub last_t: f64,
}

/// Opaque Lie algebra with optional complex structure.
pub struct LcAlgebra(Algebra);

/// Opaque flow trace.
pub struct LcTrace(FlowTrace);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> LcStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::IncompatibleFlow(_) => LcStatus::InvalidArgument,
        Error::Parse(_) | Error::UnknownEntry(_) => LcStatus::Parse,
        Error::SingularMatrix { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::NotHermitian { .. }
        | Error::NonFiniteRhs { .. } => LcStatus::Numerical,
        Error::HypothesisViolated(_) => LcStatus::Hypothesis,
        Error::Io(_) => LcStatus::Io,
        _ => LcStatus::Algebra,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (LcStatus, String)>) -> LcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            LcStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (LcStatus, String)>;
}

impl<T> IntoFfi<T> for liecurve::Result<T> {
    fn ffi(self) -> Result<T, (LcStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (LcStatus, String) {
    (LcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (LcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (LcStatus::Parse, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (LcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn alg_arg<'a>(p: *const LcAlgebra) -> Result<&'a Algebra, (LcStatus, String)> {
    p.as_ref().map(|a| &a.0).ok_or_else(|| null("algebra"))
}

unsafe fn x_arg(x: *const f64) -> Result<[f64; 4], (LcStatus, String)> {
    let s = slice_arg(x, 4, "x")?;
    Ok([s[0], s[1], s[2], s[3]])
}

fn out_string(out: *mut *mut c_char, s: String) -> Result<(), (LcStatus, String)> {
    let cs = CString::new(s).map_err(|_| (LcStatus::InvalidArgument, "string contains NUL".to_string()))?;
    unsafe { *out = cs.into_raw() };
    Ok(())
}

unsafe fn hermitian_arg(re: *const f64, im: *const f64, n: usize) -> Result<HermitianMetric, (LcStatus, String)> {
    let re = slice_arg(re, n * n, "h_re")?;
    let im = slice_arg(im, n * n, "h_im")?;
    HermitianMetric::new(CMatrix::from_fn(n, n, |r, k| c(re[r * n + k], im[r * n + k]))).ffi()
}

unsafe fn real_metric_arg(g: *const f64, n: usize) -> Result<RMatrix, (LcStatus, String)> {
    Ok(RMatrix::from_row_slice(n, n, slice_arg(g, n * n, "g")?))
}

/// Message of the last failed call on this thread, or null when there is
/// none. Release with [`lc_string_free`].
#[no_mangle]
pub extern "C" fn lc_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if e.is_empty() {
            std::ptr::null_mut()
        } else {
            CString::new(e.replace('\0', " ")).map(CString::into_raw).unwrap_or(std::ptr::null_mut())
        }
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a catalog entry (`sl2c`, `h3c`, `s3lambda:-1`, `abelian:4`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_algebra_from_catalog(name: *const c_char, out: *mut *mut LcAlgebra) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let e = catalog::load(str_arg(name, "name")?).ffi()?;
        *out = Box::into_raw(Box::new(LcAlgebra(e.algebra)));
        Ok(())
    })
}

/// Parse an algebra from its JSON description.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_algebra_from_json(text: *const c_char, out: *mut *mut LcAlgebra) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = json::parse_algebra(str_arg(text, "text")?).ffi()?;
        *out = Box::into_raw(Box::new(LcAlgebra(a)));
        Ok(())
    })
}

/// # Safety
/// `alg` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lc_algebra_free(alg: *mut LcAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Real dimension, 0 for null.
///
/// # Safety
/// `alg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_algebra_real_dim(alg: *const LcAlgebra) -> usize {
    alg.as_ref().map_or(0, |a| a.0.real_dim())
}

/// Complex dimension, 0 for null or without a complex structure.
///
/// # Safety
/// `alg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_algebra_complex_dim(alg: *const LcAlgebra) -> usize {
    alg.as_ref().and_then(|a| a.0.j.as_ref()).map_or(0, |j| j.complex_dim())
}

/// HCF tensor `K(Z_a, Zbar_b)` in the reference frame at the Hermitian
/// metric `h`, all `n x n` row-major.
///
/// # Safety
/// The four arrays must hold `n * n` doubles each.
#[no_mangle]
pub unsafe extern "C" fn lc_hcf_tensor(
    alg: *const LcAlgebra,
    h_re: *const f64,
    h_im: *const f64,
    n: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LcStatus {
    guard(|| {
        let a = alg_arg(alg)?;
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output"));
        }
        let js = a.complex_structure().ffi()?;
        if n != js.complex_dim() {
            return Err((
                LcStatus::InvalidArgument,
                format!("n = {n}, complex dimension is {}", js.complex_dim()),
            ));
        }
        let h = hermitian_arg(h_re, h_im, n)?;
        let cb = complexify(&a.bracket, js).ffi()?;
        let k = hermitian::kx_reference(&cb, &h, &HCF).ffi()?;
        for r in 0..n {
            for s in 0..n {
                *out_re.add(r * n + s) = k[(r, s)].re;
                *out_im.add(r * n + s) = k[(r, s)].im;
            }
        }
        Ok(())
    })
}

/// Curvature report (unitary-frame tensors, torsion, Lee form, scalars) as
/// JSON. `x` may be null for the HCF coefficients.
///
/// # Safety
/// `h_re`/`h_im` hold `n * n` doubles, `x` is null or holds 4, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lc_curvature_report_json(
    alg: *const LcAlgebra,
    h_re: *const f64,
    h_im: *const f64,
    n: usize,
    x: *const f64,
    out: *mut *mut c_char,
) -> LcStatus {
    guard(|| {
        let a = alg_arg(alg)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let js = a.complex_structure().ffi()?;
        if n != js.complex_dim() {
            return Err((LcStatus::InvalidArgument, format!("n = {n}, complex dimension is {}", js.complex_dim())));
        }
        let x = if x.is_null() { HCF } else { x_arg(x)? };
        let h = hermitian_arg(h_re, h_im, n)?;
        let cb = complexify(&a.bracket, js).ffi()?;
        let u = hermitian::unitary_frame(&cb, &h).ffi()?;
        let rep = hermitian::curvature_report(&u, &x);
        out_string(out, serde_json::to_string(&rep).map_err(|e| (LcStatus::Io, e.to_string()))?)
    })
}

/// Soliton certificate as JSON for the real metric `g` (`dim x dim`,
/// row-major, `dim` the real dimension). `x` is read only for `Kx`.
///
/// # Safety
/// `g` holds `dim * dim` doubles, `x` holds 4 when used, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lc_soliton_json(
    alg: *const LcAlgebra,
    g: *const f64,
    dim: usize,
    op: LcOperator,
    x: *const f64,
    out: *mut *mut c_char,
) -> LcStatus {
    guard(|| {
        let a = alg_arg(alg)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let g = real_metric_arg(g, dim)?;
        let op = match op {
            LcOperator::Hcf => Operator::Hcf,
            LcOperator::Kx => Operator::Kx(x_arg(x)?),
            LcOperator::M => Operator::M,
        };
        let cert = solitons::solve_algebraic_soliton(a, &g, op).ffi()?;
        out_string(out, serde_json::to_string(&cert).map_err(|e| (LcStatus::Io, e.to_string()))?)
    })
}

/// Integrate a flow from the real metric `g` (`dim x dim`, row-major) up to
/// `t_end`. `x` is read only for `Kx`.
///
/// # Safety
/// `g` holds `dim * dim` doubles, `x` holds 4 when used, `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lc_flow_run(
    alg: *const LcAlgebra,
    g: *const f64,
    dim: usize,
    kind: LcFlowKind,
    x: *const f64,
    t_end: f64,
    out: *mut *mut LcTrace,
) -> LcStatus {
    guard(|| {
        let a = alg_arg(alg)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !t_end.is_finite() {
            return Err((LcStatus::InvalidArgument, "t_end must be finite".into()));
        }
        let g = real_metric_arg(g, dim)?;
        let kind = match kind {
            LcFlowKind::Hcf => FlowKind::Hcf,
            LcFlowKind::Kx => FlowKind::Kx(x_arg(x)?),
            LcFlowKind::MFlow => FlowKind::MFlow,
            LcFlowKind::Ric11 => FlowKind::Ric11Flow,
            LcFlowKind::Bracket => FlowKind::BracketFlow,
            LcFlowKind::NormalizedBracket => FlowKind::NormalizedBracketFlow,
        };
        let tr = flows::integrate(&FlowProblem::new(a.clone(), g, kind, t_end)).ffi()?;
        *out = Box::into_raw(Box::new(LcTrace(tr)));
        Ok(())
    })
}

/// # Safety
/// `tr` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_free(tr: *mut LcTrace) {
    if !tr.is_null() {
        drop(Box::from_raw(tr));
    }
}

/// Number of samples, 0 for null.
///
/// # Safety
/// `tr` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_len(tr: *const LcTrace) -> usize {
    tr.as_ref().map_or(0, |t| t.0.samples.len())
}

/// Length of each state vector, 0 for null.
///
/// # Safety
/// `tr` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_state_len(tr: *const LcTrace) -> usize {
    tr.as_ref().and_then(|t| t.0.samples.first()).map_or(0, |s| s.state.len())
}

/// Time of sample `i`; NaN when out of range.
///
/// # Safety
/// `tr` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_time(tr: *const LcTrace, i: usize) -> f64 {
    tr.as_ref().and_then(|t| t.0.samples.get(i)).map_or(f64::NAN, |s| s.t)
}

/// Copy the state of sample `i` into `out` (capacity `len`).
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_state(tr: *const LcTrace, i: usize, out: *mut f64, len: usize) -> LcStatus {
    guard(|| {
        let t = tr.as_ref().ok_or_else(|| null("trace"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = t.0.samples.get(i).ok_or((LcStatus::InvalidArgument, format!("sample {i} out of range")))?;
        if len < s.state.len() {
            return Err((LcStatus::InvalidArgument, format!("buffer holds {len}, state has {}", s.state.len())));
        }
        std::ptr::copy_nonoverlapping(s.state.as_ptr(), out, s.state.len());
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_termination(tr: *const LcTrace, out: *mut LcTermination) -> LcStatus {
    guard(|| {
        let t = tr.as_ref().ok_or_else(|| null("trace"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let last_t = t.0.last().t;
        *out = match t.0.termination {
            Termination::ReachedHorizon => LcTermination {
                kind: LcTerminationKind::ReachedHorizon,
                t_est: f64::NAN,
                t_err: f64::NAN,
                last_t,
            },
            Termination::Singularity { t_est, t_err, last_t } => LcTermination {
                kind: LcTerminationKind::Singularity,
                t_est,
                t_err,
                last_t,
            },
            Termination::Converged { t, .. } => LcTermination {
                kind: LcTerminationKind::Converged,
                t_est: t,
                t_err: f64::NAN,
                last_t,
            },
            Termination::StepLimit { last_t } => LcTermination {
                kind: LcTerminationKind::StepLimit,
                t_est: f64::NAN,
                t_err: f64::NAN,
                last_t,
            },
        };
        Ok(())
    })
}

/// The trace as CSV text.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_csv(tr: *const LcTrace, out: *mut *mut c_char) -> LcStatus {
    guard(|| {
        let t = tr.as_ref().ok_or_else(|| null("trace"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        out_string(out, flows::trace::to_csv(&t.0))
    })
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn lc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
