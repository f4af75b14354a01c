//! Riemannian side of a left-invariant metric: `M`, Killing form, mean
//! curvature and the Ricci tensor `Ric = M - B/2 - S(ad_H)`.
//!
//! Real 2-tensors are matrices in the coordinates of the bracket, i.e.
//! `T[(a, b)] = T(e_a, e_b)`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::structure::Subspace;
use crate::lie::{killing_form, pi_action, trace_form, ComplexStructure, RealBracket};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::report;

/// `M` in an orthonormal frame of the bracket `mu_o` (already orthonormal).
pub fn m_orthonormal(mu_o: &RealBracket) -> RMatrix {
    let n = mu_o.dim();
    let c = mu_o.tensor();
    let mut m = RMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut a = 0.0;
            let mut b = 0.0;
            for r in 0..n {
                for k in 0..n {
                    a += c[(i, r, k)] * c[(j, r, k)];
                    b += c[(r, k, i)] * c[(r, k, j)];
                }
            }
            let v = -0.5 * a + 0.25 * b;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `M_g` as a real 2-tensor in the bracket's coordinates.
pub fn m_tensor(b: &RealBracket, g: &RMatrix) -> Result<RMatrix> {
    check_dim(b, g)?;
    let e = linalg::orthonormal_frame(g)?;
    let mu_o = b.in_basis(&e)?;
    let mo = m_orthonormal(&mu_o);
    let einv = linalg::inverse(&e)?;
    Ok(einv.transpose() * mo * einv)
}

fn check_dim(b: &RealBracket, g: &RMatrix) -> Result<()> {
    if g.nrows() != b.dim() || g.ncols() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            got: g.nrows(),
        });
    }
    Ok(())
}

/// `tr_g T = tr(g^{-1} T)`.
pub fn metric_trace(g: &RMatrix, t: &RMatrix) -> Result<f64> {
    Ok((linalg::inverse(g)? * t).trace())
}

/// `|mu|^2` measured in a `g`-orthonormal frame.
pub fn bracket_norm_sq(b: &RealBracket, g: &RMatrix) -> Result<f64> {
    crate::lie::bracket::norm_sq_in_metric(b, g)
}

/// Moment-map defect `|<M, E> - 1/4 <pi(E) mu, mu>| / (|M| |E| + eps)` with the
/// background metric `g0`; `e` is an endomorphism in the bracket's coordinates.
pub fn moment_map_residual(b: &RealBracket, e: &RMatrix, g0: &RMatrix) -> Result<f64> {
    let (lhs, rhs, scale) = moment_map_sides(b, e, g0)?;
    Ok((lhs - rhs).abs() / (scale + f64::EPSILON))
}

/// `(<M, E>, 1/4 <pi(E) mu, mu>, |M| |E|)` in a `g0`-orthonormal frame.
pub fn moment_map_sides(b: &RealBracket, e: &RMatrix, g0: &RMatrix) -> Result<(f64, f64, f64)> {
    check_dim(b, g0)?;
    if b.norm_sq() == 0.0 {
        return Err(Error::ZeroBracket);
    }
    let frame = linalg::orthonormal_frame(g0)?;
    let finv = linalg::inverse(&frame)?;
    let mu_o = b.in_basis(&frame)?;
    let e_o = &finv * e * &frame;
    let m_o = m_orthonormal(&mu_o);
    let lhs = m_o.dot(&e_o);
    let rhs = 0.25 * pi_action(&e_o, &mu_o).dot(mu_o.tensor());
    Ok((lhs, rhs, m_o.norm() * e_o.norm()))
}

/// Mean curvature vector: `g(H, X) = tr ad_X`.
pub fn mean_curvature(b: &RealBracket, g: &RMatrix) -> Result<DVector<f64>> {
    check_dim(b, g)?;
    let t = trace_form(b);
    let lu = g.clone().lu();
    lu.solve(&t).ok_or(Error::SingularMatrix {
        condition: f64::INFINITY,
    })
}

/// `S(ad_H)(X, Y) = 1/2 (g([H,X], Y) + g([H,Y], X))`.
pub fn s_ad_h(b: &RealBracket, g: &RMatrix, h: &DVector<f64>) -> RMatrix {
    let a = b.ad_vec(h);
    (a.transpose() * g + g * &a) * 0.5
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, Serialize)]
pub struct RicciReport {
    #[serde(serialize_with = "report::ser_rmatrix")]
    pub M: RMatrix,
    #[serde(serialize_with = "report::ser_rmatrix")]
    pub B_half: RMatrix,
    #[serde(serialize_with = "report::ser_rmatrix")]
    pub S_adH: RMatrix,
    #[serde(serialize_with = "report::ser_rmatrix")]
    pub Ric: RMatrix,
    #[serde(serialize_with = "report::ser_opt_rmatrix")]
    pub Ric11: Option<RMatrix>,
    #[serde(serialize_with = "report::ser_opt_rmatrix")]
    pub Ric20_02: Option<RMatrix>,
    #[serde(serialize_with = "report::ser_rvector")]
    pub H: DVector<f64>,
    /// Riemannian scalar curvature `tr_g Ric` (real trace).
    pub scalar_real: f64,
    /// `tr_g Ric^{1,1}` over a unitary frame, half of `scalar_real`; this is the
    /// normalization in which `r = k` on unimodular complex Lie groups.
    pub r: Option<f64>,
}

/// Ricci decomposition at the real metric `g`; with `j` the `(1,1)` and
/// `(2,0)+(0,2)` parts are split off and `g` must be `J`-Hermitian.
pub fn ricci_decomposition(
    b: &RealBracket,
    j: Option<&ComplexStructure>,
    g: &RMatrix,
) -> Result<RicciReport> {
    check_dim(b, g)?;
    linalg::ensure_positive_definite(g)?;
    let m = m_tensor(b, g)?;
    let b_half = killing_form(b) * 0.5;
    let h = mean_curvature(b, g)?;
    let s = s_ad_h(b, g, &h);
    let ric = &m - &b_half - &s;
    let scalar_real = metric_trace(g, &ric)?;
    let (ric11, ric20, r) = match j {
        Some(js) => {
            let residual = js.hermitian_residual(g) / g.amax();
            if residual > 1e-10 {
                return Err(Error::NotHermitian { residual });
            }
            let jm = js.j();
            let r11 = (&ric + jm.transpose() * &ric * jm) * 0.5;
            let r20 = &ric - &r11;
            let r = 0.5 * metric_trace(g, &r11)?;
            (Some(r11), Some(r20), Some(r))
        }
        None => (None, None, None),
    };
    Ok(RicciReport {
        M: m,
        B_half: b_half,
        S_adH: s,
        Ric: ric,
        Ric11: ric11,
        Ric20_02: ric20,
        H: h,
        scalar_real,
        r,
    })
}

/// `Ric^{1,1}` as a Hermitian matrix in the reference frame of `js`, at the
/// Hermitian metric `h`.
pub fn ric11_hermitian(b: &RealBracket, js: &ComplexStructure, h: &CMatrix) -> Result<CMatrix> {
    let g = js.real_metric(h)?;
    let rep = ricci_decomposition(b, Some(js), &g)?;
    js.to_hermitian(rep.Ric11.as_ref().expect("complex structure supplied"))
}

/// `M` as a Hermitian matrix in the reference frame of `js`.
pub fn m_hermitian(b: &RealBracket, js: &ComplexStructure, h: &CMatrix) -> Result<CMatrix> {
    let g = js.real_metric(h)?;
    js.to_hermitian(&m_tensor(b, &g)?)
}

/// `g`-orthonormal basis of the span of the given vectors.
fn g_orthonormalize(g: &RMatrix, s: &Subspace) -> Result<RMatrix> {
    let v = RMatrix::from_columns(s);
    let gram = v.transpose() * g * &v;
    let frame = linalg::orthonormal_frame(&gram)?;
    Ok(v * frame)
}

/// `tr_g M` restricted to an abelian ideal.
pub fn dotti_trace(b: &RealBracket, g: &RMatrix, ideal: &Subspace) -> Result<f64> {
    check_dim(b, g)?;
    crate::lie::structure::check_abelian_ideal(b, ideal)?;
    if ideal.is_empty() {
        return Ok(0.0);
    }
    let m = m_tensor(b, g)?;
    let y = g_orthonormalize(g, ideal)?;
    Ok((y.transpose() * m * y).trace())
}

/// `1/4 sum_{j,k,i} g(mu(X_j, X_k), Y_i)^2` over a `g`-orthonormal basis `X`
/// of the algebra and `Y` of the ideal. Equals [`dotti_trace`] when the ideal
/// is central.
pub fn dotti_central_sum(b: &RealBracket, g: &RMatrix, ideal: &Subspace) -> Result<f64> {
    let x = linalg::orthonormal_frame(g)?;
    let y = g_orthonormalize(g, ideal)?;
    let n = b.dim();
    let mut s = 0.0;
    for j in 0..n {
        for k in 0..n {
            let v = b.apply(&x.column(j).into_owned(), &x.column(k).into_owned());
            let gv = g * v;
            for i in 0..y.ncols() {
                let comp = gv.dot(&y.column(i));
                s += comp * comp;
            }
        }
    }
    Ok(0.25 * s)
}
