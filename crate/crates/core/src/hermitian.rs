//! Chern connection quantities of left-invariant Hermitian metrics.
//!
//! All formulas are evaluated in a unitary frame `W_1..W_n`. Complex indices
//! follow [`ComplexFrameBracket`]: `i` is `W_i`, `n + i` is `Wbar_i`. Matrices
//! `A_{i jbar}` are stored as `A[(i, j)]` and are tensor components, i.e.
//! `A(W_i, Wbar_j)`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::ComplexFrameBracket;
use crate::linalg::{self, c, CMatrix};
use crate::report;
use crate::tensor::Tensor3;
use crate::tol;

/// `x` for the HCF: `Q = 1/2 Q1 - 1/4 Q2 - 1/2 Q3 + Q4`.
pub const HCF: [f64; 4] = [0.5, -0.25, -0.5, 1.0];
/// `x` for the pluriclosed flow.
pub const PCF: [f64; 4] = [1.0, 0.0, 0.0, 0.0];
/// `x` for the modified HCF.
pub const MODIFIED_HCF: [f64; 4] = [0.0, -0.5, 0.0, 0.0];

/// Positive-definite Hermitian matrix `h_ij = g(Z_i, Zbar_j)` in a reference
/// (1,0)-frame.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMetric {
    h: CMatrix,
}

impl HermitianMetric {
    pub fn new(h: CMatrix) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::DimensionMismatch {
                expected: h.nrows(),
                got: h.ncols(),
            });
        }
        let scale = linalg::frobenius_c(&h).max(f64::MIN_POSITIVE);
        let residual = linalg::hermitian_defect(&h) / scale;
        if residual > 1e-12 {
            return Err(Error::NotHermitian { residual });
        }
        let h = (&h + h.adjoint()) * c(0.5, 0.0);
        linalg::ensure_positive_definite_herm(&h)?;
        Ok(Self { h })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            h: CMatrix::identity(n, n),
        }
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        Self::new(CMatrix::from_fn(n, n, |r, col| {
            if r == col {
                c(d[r], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(&self.h * c(s, 0.0))
    }
}

/// A unitary frame `W_a = sum_b U[(b, a)] Z_b` and the bracket in that frame.
#[derive(Clone, Debug)]
pub struct UnitaryFrameData {
    pub frame_change: CMatrix,
    pub bracket: ComplexFrameBracket,
}

/// Lower-triangular `U` with `U^T h conj(U) = I`, so that `W_n` is a multiple
/// of `Z_n`, `W_{n-1}` lies in `<Z_{n-1}, Z_n>`, and so on.
pub fn flag_frame_change(h: &CMatrix) -> Result<CMatrix> {
    let n = h.nrows();
    linalg::ensure_positive_definite_herm(h)?;
    let rev = |m: &CMatrix| CMatrix::from_fn(n, n, |r, col| m[(n - 1 - r, n - 1 - col)]);
    let ph = rev(h);
    let l = ph
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { ratio: 0.0 })?
        .l();
    // h = R R^*, R upper triangular; U = (R^T)^{-1}
    let r = rev(&l);
    let rt_inv = r
        .transpose()
        .try_inverse()
        .ok_or(Error::SingularMatrix { condition: f64::INFINITY })?;
    Ok(rt_inv)
}

/// Unitary frame from the flag construction.
pub fn unitary_frame(b: &ComplexFrameBracket, g: &HermitianMetric) -> Result<UnitaryFrameData> {
    if g.dim() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            got: g.dim(),
        });
    }
    let u = flag_frame_change(g.matrix())?;
    Ok(UnitaryFrameData {
        bracket: b.change_holomorphic_frame(&u)?,
        frame_change: u,
    })
}

/// Unitary frame from a caller-supplied frame change, which must satisfy
/// `U^T h conj(U) = I`.
pub fn unitary_frame_with(
    b: &ComplexFrameBracket,
    g: &HermitianMetric,
    u: &CMatrix,
) -> Result<UnitaryFrameData> {
    let n = b.n();
    let gram = u.transpose() * g.matrix() * u.map(|z| z.conj());
    let defect = linalg::frobenius_c(&(gram - CMatrix::identity(n, n)));
    if defect > 1e-10 {
        return Err(Error::NotHermitian { residual: defect });
    }
    Ok(UnitaryFrameData {
        bracket: b.change_holomorphic_frame(u)?,
        frame_change: u.clone(),
    })
}

impl UnitaryFrameData {
    pub fn n(&self) -> usize {
        self.bracket.n()
    }

    /// `A(Z_a, Zbar_b)` from `A(W_c, Wbar_d)`.
    pub fn to_reference(&self, a: &CMatrix) -> CMatrix {
        let uinv = self
            .frame_change
            .clone()
            .try_inverse()
            .expect("unitary frame change is invertible");
        uinv.transpose() * a * uinv.map(|z| z.conj())
    }

    /// `A(W_a, Wbar_b)` from `A(Z_c, Zbar_d)`.
    pub fn from_reference(&self, a: &CMatrix) -> CMatrix {
        let u = &self.frame_change;
        u.transpose() * a * u.map(|z| z.conj())
    }

    #[inline]
    fn m(&self, p: usize, q: usize, r: usize) -> Complex64 {
        self.bracket.get(p, q, r)
    }
}

fn zero() -> Complex64 {
    c(0.0, 0.0)
}

/// `T_ij^k = -mu_{i kbar}^{jbar} + mu_{j kbar}^{ibar} - mu_ij^k`.
pub fn chern_torsion(u: &UnitaryFrameData) -> Tensor3<Complex64> {
    let n = u.n();
    Tensor3::from_fn(n, |i, j, k| {
        -u.m(i, n + k, n + j) + u.m(j, n + k, n + i) - u.m(i, j, k)
    })
}

/// First Chern-Ricci type contraction `S_{i jbar}` of the Chern curvature.
#[allow(non_snake_case)]
pub fn chern_S(u: &UnitaryFrameData) -> CMatrix {
    let n = u.n();
    let b = |i: usize| n + i;
    CMatrix::from_fn(n, n, |i, j| {
        let mut s = zero();
        for k in 0..n {
            for r in 0..n {
                s -= u.m(b(k), i, r) * u.m(k, b(j), b(r));
                s += u.m(k, b(r), b(i)) * u.m(b(k), r, j);
                s += u.m(k, b(k), r) * u.m(r, b(j), b(i));
                s -= u.m(k, b(k), b(r)) * u.m(b(r), i, j);
            }
        }
        s
    })
}

/// Chern scalar curvature from its closed contraction (independent of `chern_S`).
pub fn chern_scalar(u: &UnitaryFrameData) -> f64 {
    let n = u.n();
    let mut s = zero();
    for k in 0..n {
        for r in 0..n {
            for i in 0..n {
                s += u.m(k, n + k, r) * u.m(r, n + i, n + i);
                s -= u.m(k, n + k, n + r) * u.m(n + r, i, i);
            }
        }
    }
    s.re
}

/// Lee form `w_i = sum_k T_ik^k`.
pub fn lee_form_from_torsion(t: &Tensor3<Complex64>) -> DVector<Complex64> {
    let n = t.dim();
    DVector::from_fn(n, |i, _| (0..n).map(|k| t[(i, k, k)]).sum())
}

pub fn lee_form(u: &UnitaryFrameData) -> DVector<Complex64> {
    lee_form_from_torsion(&chern_torsion(u))
}

fn bracket_scale(u: &UnitaryFrameData) -> f64 {
    u.bracket.tensor().norm_sq().sqrt()
}

/// `|w| <= tau_alg` relative to the bracket size.
pub fn is_balanced(u: &UnitaryFrameData) -> bool {
    let w = lee_form(u);
    let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let s = bracket_scale(u);
    s == 0.0 || wn <= tol::tau_alg() * s
}

/// `|sum_k mu(W_k, Wbar_k)|`, the balanced criterion for unimodular algebras
/// with abelian complex structure.
pub fn mixed_trace_norm(u: &UnitaryFrameData) -> f64 {
    let n = u.n();
    let mut total = 0.0;
    for r in 0..2 * n {
        let v: Complex64 = (0..n).map(|k| u.m(k, n + k, r)).sum();
        total += v.norm_sqr();
    }
    total.sqrt()
}

/// `Q^1 .. Q^4` built from the torsion.
pub fn q_tensors_from_torsion(t: &Tensor3<Complex64>) -> [CMatrix; 4] {
    let n = t.dim();
    let w = lee_form_from_torsion(t);
    let q1 = CMatrix::from_fn(n, n, |i, j| {
        let mut s = zero();
        for k in 0..n {
            for r in 0..n {
                s += t[(i, k, r)] * t[(j, k, r)].conj();
            }
        }
        s
    });
    let q2 = CMatrix::from_fn(n, n, |i, j| {
        let mut s = zero();
        for k in 0..n {
            for r in 0..n {
                s += t[(k, r, i)].conj() * t[(k, r, j)];
            }
        }
        s
    });
    let q3 = CMatrix::from_fn(n, n, |i, j| w[i] * w[j].conj());
    let q4 = CMatrix::from_fn(n, n, |i, j| {
        let mut s = zero();
        for m in 0..n {
            s += w[m] * t[(m, j, i)].conj() + w[m].conj() * t[(m, i, j)];
        }
        s * 0.5
    });
    [q1, q2, q3, q4]
}

pub fn q_tensors(u: &UnitaryFrameData) -> [CMatrix; 4] {
    q_tensors_from_torsion(&chern_torsion(u))
}

/// `K^x = S - sum x_i Q^i`.
pub fn k_x(u: &UnitaryFrameData, x: &[f64; 4]) -> CMatrix {
    let s = chern_S(u);
    let q = q_tensors(u);
    combine(&s, &q, x)
}

fn combine(s: &CMatrix, q: &[CMatrix; 4], x: &[f64; 4]) -> CMatrix {
    let mut k = s.clone();
    for (qi, xi) in q.iter().zip(x) {
        if *xi != 0.0 {
            k -= qi * c(*xi, 0.0);
        }
    }
    k
}

#[allow(non_snake_case)]
pub fn hcf_K(u: &UnitaryFrameData) -> CMatrix {
    k_x(u, &HCF)
}

/// `K` on a complex Lie group (all mixed brackets vanish), from the reduced
/// formula in the holomorphic structure constants alone.
#[allow(non_snake_case)]
pub fn complex_group_K(u: &UnitaryFrameData) -> Result<CMatrix> {
    let n = u.n();
    let b = &u.bracket;
    let scale = bracket_scale(u).max(f64::MIN_POSITIVE);
    let mut mixed: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                mixed = mixed
                    .max(b.mu_mixed_hol(i, j, k).norm())
                    .max(b.mu_mixed_anti(i, j, k).norm());
            }
        }
    }
    if mixed / scale > tol::tau_alg() {
        return Err(Error::HypothesisViolated(format!(
            "mixed brackets do not vanish (relative size {:.2e})",
            mixed / scale
        )));
    }
    let mu = |i: usize, j: usize, k: usize| b.mu_hol(i, j, k);
    let tr: Vec<Complex64> = (0..n).map(|i| (0..n).map(|k| mu(i, k, k)).sum()).collect();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = zero();
            for k in 0..n {
                for r in 0..n {
                    s += -0.5 * mu(i, k, r) * mu(j, k, r).conj() + 0.25 * mu(k, r, i).conj() * mu(k, r, j);
                }
            }
            s += 0.5 * tr[i] * tr[j].conj();
            for r in 0..n {
                s -= 0.5 * (tr[r] * mu(r, j, i).conj() + mu(r, i, j) * tr[r].conj());
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

fn check_abelian_unimodular(u: &UnitaryFrameData) -> Result<()> {
    let n = u.n();
    let scale = bracket_scale(u).max(f64::MIN_POSITIVE);
    let mut hol: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for r in 0..2 * n {
                hol = hol.max(u.m(i, j, r).norm());
            }
        }
    }
    if hol / scale > tol::tau_alg() {
        return Err(Error::NotAbelian {
            residual: hol / scale,
        });
    }
    let mut tr: f64 = 0.0;
    for p in 0..2 * n {
        let t: Complex64 = (0..2 * n).map(|q| u.m(p, q, q)).sum();
        tr = tr.max(t.norm());
    }
    if tr / scale > tol::tau_alg() {
        return Err(Error::NotUnimodular {
            residual: tr / scale,
        });
    }
    Ok(())
}

/// `K` on a unimodular algebra with abelian complex structure, from the
/// simplified closed formula.
#[allow(non_snake_case)]
pub fn abelian_K(u: &UnitaryFrameData) -> Result<CMatrix> {
    check_abelian_unimodular(u)?;
    let n = u.n();
    let b = |i: usize| n + i;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let mut s = zero();
        for k in 0..n {
            for r in 0..n {
                s -= u.m(b(k), i, r) * u.m(k, b(j), b(r));
                s += u.m(k, b(r), b(i)) * u.m(b(k), r, j);
                s -= u.m(i, b(r), b(k)) * u.m(b(j), r, k);
                s += u.m(k, b(k), b(i)) * u.m(b(r), r, j);
                s -= u.m(k, b(k), b(r)) * u.m(b(j), i, r);
                s -= u.m(b(k), k, r) * u.m(i, b(j), b(r));
            }
        }
        s * 0.5
    }))
}

/// `Ric^{1,1}` on a unimodular algebra with abelian complex structure.
pub fn abelian_ric11(u: &UnitaryFrameData) -> Result<CMatrix> {
    check_abelian_unimodular(u)?;
    let n = u.n();
    let b = |i: usize| n + i;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let mut s = zero();
        for r in 0..n {
            for l in 0..n {
                s += u.m(r, b(l), b(i)) * u.m(b(r), l, j);
                s -= u.m(b(l), i, b(r)) * u.m(l, b(j), r);
                s -= u.m(b(l), i, r) * u.m(l, b(j), b(r));
            }
        }
        s * 0.5
    }))
}

/// `k - tr Ric^{1,1} = -1/2 sum mu_{kbar k}^r mu_{i ibar}^{rbar}` for abelian J.
pub fn abelian_scalar_gap(u: &UnitaryFrameData) -> f64 {
    let n = u.n();
    let mut s = zero();
    for k in 0..n {
        for r in 0..n {
            for i in 0..n {
                s += u.m(n + k, k, r) * u.m(i, n + i, n + r);
            }
        }
    }
    -0.5 * s.re
}

/// Every Chern-side tensor at one metric, in the unitary frame.
#[allow(non_snake_case)]
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureReport {
    #[serde(serialize_with = "report::ser_cmatrix")]
    pub frame_change: CMatrix,
    #[serde(serialize_with = "report::ser_cmatrix")]
    pub S: CMatrix,
    #[serde(serialize_with = "report::ser_cmatrix")]
    pub Q1: CMatrix,
    #[serde(serialize_with = "report::ser_cmatrix")]
    pub Q2: CMatrix,
    #[serde(serialize_with = "report::ser_cmatrix")]
    pub Q3: CMatrix,
    #[serde(serialize_with = "report::ser_cmatrix")]
    pub Q4: CMatrix,
    #[serde(serialize_with = "report::ser_cmatrix")]
    pub K: CMatrix,
    pub x: [f64; 4],
    #[serde(serialize_with = "report::ser_cmatrix")]
    pub Kx: CMatrix,
    #[serde(serialize_with = "report::ser_ctensor")]
    pub T: Tensor3<Complex64>,
    #[serde(serialize_with = "report::ser_cvector")]
    pub lee_w: DVector<Complex64>,
    /// Chern scalar curvature `tr S`.
    pub s: f64,
    /// `tr K`.
    pub k_scalar: f64,
    pub balanced: bool,
}

pub fn curvature_report(u: &UnitaryFrameData, x: &[f64; 4]) -> CurvatureReport {
    let s = chern_S(u);
    let t = chern_torsion(u);
    let q = q_tensors_from_torsion(&t);
    let k = combine(&s, &q, &HCF);
    let kx = combine(&s, &q, x);
    let w = lee_form_from_torsion(&t);
    let trace = |m: &CMatrix| m.trace().re;
    let scale = bracket_scale(u);
    let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let [q1, q2, q3, q4] = q;
    CurvatureReport {
        frame_change: u.frame_change.clone(),
        s: trace(&s),
        k_scalar: trace(&k),
        S: s,
        Q1: q1,
        Q2: q2,
        Q3: q3,
        Q4: q4,
        K: k,
        x: *x,
        Kx: kx,
        T: t,
        lee_w: w,
        balanced: scale == 0.0 || wn <= tol::tau_alg() * scale,
    }
}

/// Traces of the `Q` tensors alongside independent norms of `T` and `w`.
#[derive(Clone, Debug, Serialize)]
pub struct TraceIdentities {
    pub q: [f64; 4],
    pub t_norm_sq: f64,
    pub w_norm_sq: f64,
}

impl TraceIdentities {
    /// Largest relative deviation among `q1 = q2 = |T|^2` and `q3 = q4 = |w|^2`;
    /// the `w` identities are measured against `|T|^2` when `w` vanishes.
    pub fn max_relative_error(&self) -> f64 {
        let scale = self.t_norm_sq.max(f64::MIN_POSITIVE);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(scale);
        let t = self.t_norm_sq;
        let w = self.w_norm_sq;
        [
            rel(self.q[0], t),
            rel(self.q[1], t),
            rel(self.q[2], w),
            rel(self.q[3], w),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn trace_identities(u: &UnitaryFrameData) -> TraceIdentities {
    let t = chern_torsion(u);
    let q = q_tensors_from_torsion(&t);
    let t_norm_sq = t.norm_sq();
    let w = lee_form_from_torsion(&t);
    let w_norm_sq = w.iter().map(|z| z.norm_sqr()).sum();
    TraceIdentities {
        q: [q[0].trace().re, q[1].trace().re, q[2].trace().re, q[3].trace().re],
        t_norm_sq,
        w_norm_sq,
    }
}

/// Endomorphism `E` with `A(Z_a, Zbar_b) = h(E Z_a, Zbar_b)` in the reference frame.
pub fn endomorphism(h: &HermitianMetric, a: &CMatrix) -> Result<CMatrix> {
    let hinv = linalg::inverse_c(h.matrix())?;
    Ok((a * hinv).transpose())
}

/// `K^x(g)` as a tensor in the reference frame.
pub fn kx_reference(b: &ComplexFrameBracket, g: &HermitianMetric, x: &[f64; 4]) -> Result<CMatrix> {
    let u = unitary_frame(b, g)?;
    Ok(u.to_reference(&k_x(&u, x)))
}
