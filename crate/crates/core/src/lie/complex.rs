//! Complex structures and brackets expressed in complex frames.
//!
//! For a J-adapted real basis `X_1..X_n` (so that `X_1..X_n, JX_1..JX_n` is a
//! basis) the reference frame is `Z_a = (X_a - i J X_a)/sqrt(2)` together with
//! the conjugates `Zbar_a`. Complex tensors over the full frame use indices
//! `0..n` for `Z_a` and `n..2n` for `Zbar_a`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::bracket::RealBracket;
use crate::linalg::{self, c, CMatrix, RMatrix};
use crate::tensor::Tensor3;
use crate::tol;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A linear complex structure `J` (`J^2 = -1`) with a chosen adapted basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexStructure {
    j: RMatrix,
    /// `n_R x n` matrix whose columns are the adapted vectors `X_a`.
    basis: RMatrix,
}

impl ComplexStructure {
    /// Validate `j` and pick an adapted basis greedily from the standard basis.
    pub fn new(j: RMatrix) -> Result<Self> {
        check_square_j(&j)?;
        let nr = j.nrows();
        let n = nr / 2;
        let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(n);
        let mut spanned: Vec<DVector<f64>> = Vec::with_capacity(nr);
        for i in 0..nr {
            if chosen.len() == n {
                break;
            }
            let e = unit(nr, i);
            let je = &j * &e;
            let mut trial = spanned.clone();
            trial.push(e.clone());
            trial.push(je.clone());
            if linalg::rank_of(&trial, 1e-10) == trial.len() {
                spanned = trial;
                chosen.push(e);
            }
        }
        if chosen.len() != n {
            return Err(Error::InvalidComplexStructure(
                "could not extract an adapted basis".into(),
            ));
        }
        Ok(Self {
            j,
            basis: RMatrix::from_columns(&chosen),
        })
    }

    /// Use the given adapted vectors (columns of `x`, `n_R x n`).
    pub fn with_basis(j: RMatrix, x: RMatrix) -> Result<Self> {
        check_square_j(&j)?;
        let nr = j.nrows();
        if x.nrows() != nr || 2 * x.ncols() != nr {
            return Err(Error::DimensionMismatch {
                expected: nr,
                got: x.nrows(),
            });
        }
        let jx = &j * &x;
        let mut cols: Vec<DVector<f64>> = x.column_iter().map(|c| c.into_owned()).collect();
        cols.extend(jx.column_iter().map(|c| c.into_owned()));
        if linalg::rank_of(&cols, 1e-10) != nr {
            return Err(Error::NotAdapted);
        }
        Ok(Self { j, basis: x })
    }

    /// `J e_a = e_{n+a}` on `R^{2n}`.
    pub fn standard(n: usize) -> Self {
        let nr = 2 * n;
        let mut j = RMatrix::zeros(nr, nr);
        for a in 0..n {
            j[(n + a, a)] = 1.0;
            j[(a, n + a)] = -1.0;
        }
        let basis = RMatrix::from_fn(nr, n, |r, col| if r == col { 1.0 } else { 0.0 });
        Self { j, basis }
    }

    pub fn j(&self) -> &RMatrix {
        &self.j
    }

    pub fn basis(&self) -> &RMatrix {
        &self.basis
    }

    pub fn real_dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn complex_dim(&self) -> usize {
        self.j.nrows() / 2
    }

    /// Real matrix with columns `X_1..X_n, JX_1..JX_n`.
    pub fn real_frame(&self) -> RMatrix {
        let n = self.complex_dim();
        let jx = &self.j * &self.basis;
        let mut m = RMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (2 * n, n)).copy_from(&self.basis);
        m.view_mut((0, n), (2 * n, n)).copy_from(&jx);
        m
    }

    /// Complex `2n x 2n` matrix whose columns are `Z_1..Z_n, Zbar_1..Zbar_n`.
    pub fn frame(&self) -> CMatrix {
        let n = self.complex_dim();
        let jx = &self.j * &self.basis;
        let nr = 2 * n;
        CMatrix::from_fn(nr, nr, |r, col| {
            if col < n {
                c(self.basis[(r, col)], -jx[(r, col)]) * SQRT_HALF
            } else {
                let a = col - n;
                c(self.basis[(r, a)], jx[(r, a)]) * SQRT_HALF
            }
        })
    }

    /// `max |J^T g J - g|`, zero when `g` is J-Hermitian.
    pub fn hermitian_residual(&self, g: &RMatrix) -> f64 {
        let d = self.j.transpose() * g * &self.j - g;
        d.amax()
    }

    /// Hermitian matrix `h_ab = g(Z_a, Zbar_b)` of a J-invariant real 2-tensor.
    pub fn to_hermitian(&self, g: &RMatrix) -> Result<CMatrix> {
        let nr = self.real_dim();
        if g.nrows() != nr || g.ncols() != nr {
            return Err(Error::DimensionMismatch {
                expected: nr,
                got: g.nrows(),
            });
        }
        let n = self.complex_dim();
        let f = self.frame();
        let gc = linalg::to_complex(g);
        let full = f.transpose() * gc * &f;
        Ok(full.view((0, n), (n, n)).into_owned())
    }

    /// Real J-invariant 2-tensor with `g(Z_a, Zbar_b) = h_ab` and
    /// `g(Z_a, Z_b) = 0`.
    pub fn to_real(&self, h: &CMatrix) -> Result<RMatrix> {
        let n = self.complex_dim();
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: h.nrows(),
            });
        }
        let f = self.frame();
        let finv = linalg::inverse_c(&f)?;
        let mut full = CMatrix::zeros(2 * n, 2 * n);
        full.view_mut((0, n), (n, n)).copy_from(h);
        full.view_mut((n, 0), (n, n)).copy_from(&h.transpose());
        let g = finv.transpose() * full * finv;
        Ok(g.map(|z| z.re))
    }

    /// Hermitian metric of a positive-definite J-invariant real metric.
    pub fn hermitian_metric(&self, g: &RMatrix) -> Result<CMatrix> {
        linalg::ensure_positive_definite(g)?;
        let residual = self.hermitian_residual(g) / g.amax().max(f64::MIN_POSITIVE);
        if residual > 1e-10 {
            return Err(Error::NotHermitian { residual });
        }
        self.to_hermitian(g)
    }

    /// Real metric of a positive-definite Hermitian matrix.
    pub fn real_metric(&self, h: &CMatrix) -> Result<RMatrix> {
        linalg::ensure_positive_definite_herm(h)?;
        self.to_real(h)
    }
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 })
}

fn check_square_j(j: &RMatrix) -> Result<()> {
    let nr = j.nrows();
    if j.ncols() != nr {
        return Err(Error::DimensionMismatch {
            expected: nr,
            got: j.ncols(),
        });
    }
    if nr == 0 || nr % 2 != 0 {
        return Err(Error::InvalidComplexStructure(format!(
            "real dimension {nr} is not a positive even number"
        )));
    }
    let sq = j * j + RMatrix::identity(nr, nr);
    let residual = sq.amax() / j.amax().powi(2).max(1.0);
    if residual > tol::tau_alg() {
        return Err(Error::InvalidComplexStructure(format!(
            "J^2 + Id has residual {residual:e}"
        )));
    }
    Ok(())
}

/// Structure constants of the complexified bracket in a frame
/// `Z_1..Z_n, Zbar_1..Zbar_n` (columns of `frame`, in real coordinates).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexFrameBracket {
    n: usize,
    frame: CMatrix,
    c: Tensor3<Complex64>,
}

impl ComplexFrameBracket {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Frame vectors as columns in real coordinates.
    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    pub fn tensor(&self) -> &Tensor3<Complex64> {
        &self.c
    }

    /// Index of `Zbar_i`.
    #[inline]
    pub fn bar(&self, i: usize) -> usize {
        self.n + i
    }

    /// Raw component over the full frame.
    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize) -> Complex64 {
        self.c[(p, q, r)]
    }

    /// `mu_{ij}^k`.
    pub fn mu_hol(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.c[(i, j, k)]
    }

    /// `mu_{i jbar}^k`.
    pub fn mu_mixed_hol(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.c[(i, self.n + j, k)]
    }

    /// `mu_{i jbar}^{kbar}`.
    pub fn mu_mixed_anti(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.c[(i, self.n + j, self.n + k)]
    }

    /// Largest deviation from antisymmetry and conjugation symmetry.
    pub fn consistency_defect(&self) -> f64 {
        let m = 2 * self.n;
        let sigma = |p: usize| if p < self.n { p + self.n } else { p - self.n };
        let mut worst: f64 = 0.0;
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    let v = self.c[(p, q, r)];
                    worst = worst.max((v + self.c[(q, p, r)]).norm());
                    worst = worst.max((v.conj() - self.c[(sigma(p), sigma(q), sigma(r))]).norm());
                }
            }
        }
        worst
    }

    /// Re-express in the frame with columns `frame * p`.
    pub fn change_frame(&self, p: &CMatrix) -> Result<Self> {
        let pinv = linalg::inverse_c(p)?;
        Ok(Self {
            n: self.n,
            frame: &self.frame * p,
            c: transform_complex(&self.c, p, &pinv),
        })
    }

    /// New holomorphic frame `W_a = sum_b u[(b, a)] Z_b`, antiholomorphic by
    /// conjugation.
    pub fn change_holomorphic_frame(&self, u: &CMatrix) -> Result<Self> {
        let n = self.n;
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.nrows(),
            });
        }
        let mut p = CMatrix::zeros(2 * n, 2 * n);
        p.view_mut((0, 0), (n, n)).copy_from(u);
        p.view_mut((n, n), (n, n)).copy_from(&u.map(|z| z.conj()));
        self.change_frame(&p)
    }

    /// Real structure constants in the original real coordinates.
    pub fn realify(&self) -> Result<RealBracket> {
        let finv = linalg::inverse_c(&self.frame)?;
        let t = transform_complex(&self.c, &finv, &self.frame);
        let imag = t.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        let scale = t.max_abs().max(1.0);
        if imag > 1e-9 * scale {
            return Err(Error::InvalidComplexStructure(format!(
                "complex components do not come from a real bracket (imaginary residual {imag:e})"
            )));
        }
        RealBracket::new(t.map(|z| z.re))
    }
}

/// `C'[a][b][c] = sum p[p][a] p[q][b] C[p][q][r] pinv[c][r]`, i.e. components in
/// the frame whose vectors are the columns of `old_frame * p`.
pub(crate) fn transform_complex(
    t: &Tensor3<Complex64>,
    p: &CMatrix,
    pinv: &CMatrix,
) -> Tensor3<Complex64> {
    let m = t.dim();
    let zero = c(0.0, 0.0);
    let mut t1 = Tensor3::zeros(m);
    for a in 0..m {
        for q in 0..m {
            for r in 0..m {
                let mut s = zero;
                for pp in 0..m {
                    let w = p[(pp, a)];
                    if w != zero {
                        s += w * t[(pp, q, r)];
                    }
                }
                t1[(a, q, r)] = s;
            }
        }
    }
    let mut t2 = Tensor3::zeros(m);
    for a in 0..m {
        for b in 0..m {
            for r in 0..m {
                let mut s = zero;
                for q in 0..m {
                    let w = p[(q, b)];
                    if w != zero {
                        s += w * t1[(a, q, r)];
                    }
                }
                t2[(a, b, r)] = s;
            }
        }
    }
    let mut out = Tensor3::zeros(m);
    for a in 0..m {
        for b in 0..m {
            for cc in 0..m {
                let mut s = zero;
                for r in 0..m {
                    s += pinv[(cc, r)] * t2[(a, b, r)];
                }
                out[(a, b, cc)] = s;
            }
        }
    }
    out
}

/// Components of `mu` in the reference frame of `js`.
pub fn complexify(b: &RealBracket, js: &ComplexStructure) -> Result<ComplexFrameBracket> {
    let nr = b.dim();
    if js.real_dim() != nr {
        return Err(Error::DimensionMismatch {
            expected: nr,
            got: js.real_dim(),
        });
    }
    let f = js.frame();
    let finv = linalg::inverse_c(&f)?;
    let ct = b.tensor().map(|x| c(*x, 0.0));
    Ok(ComplexFrameBracket {
        n: nr / 2,
        c: transform_complex(&ct, &f, &finv),
        frame: f,
    })
}

/// `complexify` with an explicitly supplied adapted basis.
pub fn complexify_in_basis(
    b: &RealBracket,
    j: &RMatrix,
    adapted: &RMatrix,
) -> Result<ComplexFrameBracket> {
    let js = ComplexStructure::with_basis(j.clone(), adapted.clone())?;
    complexify(b, &js)
}

/// Real form of a complex Lie algebra given by `mu(Z_a, Z_b) = sum_d m[a][b][d] Z_d`.
///
/// The real basis is `x_1..x_n, y_1..y_n` with `J x_a = y_a`, and the
/// constants are scaled so that the reference frame of the returned complex
/// structure reproduces `m` exactly.
pub fn realify_holomorphic(m: &Tensor3<Complex64>) -> (RealBracket, ComplexStructure) {
    let n = m.dim();
    let s = SQRT_HALF;
    let mut c3 = Tensor3::zeros(2 * n);
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                let z = m[(a, b, d)] * s;
                let (al, be) = (z.re, z.im);
                // mu(x_a, x_b) = al x_d + be y_d
                c3[(a, b, d)] += al;
                c3[(a, b, n + d)] += be;
                // mu(x_a, y_b) = al y_d - be x_d
                c3[(a, n + b, n + d)] += al;
                c3[(a, n + b, d)] -= be;
                // mu(y_a, x_b) = mu(x_a, y_b)
                c3[(n + a, b, n + d)] += al;
                c3[(n + a, b, d)] -= be;
                // mu(y_a, y_b) = -mu(x_a, x_b)
                c3[(n + a, n + b, d)] -= al;
                c3[(n + a, n + b, n + d)] -= be;
            }
        }
    }
    (RealBracket::antisymmetrized(&c3), ComplexStructure::standard(n))
}

/// Outcome of the complex-structure predicates with their residuals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JPredicates {
    pub integrable: bool,
    pub abelian: bool,
    pub bi_invariant: bool,
    pub integrable_residual: f64,
    pub abelian_residual: f64,
    pub bi_invariant_residual: f64,
}

/// Integrability, abelianness and bi-invariance of `J` for the bracket.
/// Residuals are maxima of the relevant components divided by `|mu|`.
pub fn complex_structure_predicates(
    b: &RealBracket,
    js: &ComplexStructure,
) -> Result<JPredicates> {
    let cb = complexify(b, js)?;
    let n = cb.n();
    let norm = cb.tensor().norm_sq().sqrt();
    let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
    let mut integ: f64 = 0.0;
    let mut abel: f64 = 0.0;
    let mut bi: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..2 * n {
                let hh = cb.get(i, j, k).norm();
                abel = abel.max(hh);
                if k >= n {
                    integ = integ.max(hh);
                }
                bi = bi.max(cb.get(i, n + j, k).norm());
            }
        }
    }
    let tau = tol::tau_alg();
    Ok(JPredicates {
        integrable: integ * scale <= tau,
        abelian: abel * scale <= tau,
        bi_invariant: bi * scale <= tau,
        integrable_residual: integ * scale,
        abelian_residual: abel * scale,
        bi_invariant_residual: bi * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2c_hol() -> Tensor3<Complex64> {
        let mut m = Tensor3::zeros(3);
        let one = c(1.0, 0.0);
        m[(0, 1, 2)] = one;
        m[(1, 0, 2)] = -one;
        m[(0, 2, 1)] = -one;
        m[(2, 0, 1)] = one;
        m[(1, 2, 0)] = one;
        m[(2, 1, 0)] = -one;
        m
    }

    #[test]
    fn realified_complex_algebra_round_trips() {
        let m = sl2c_hol();
        let (b, js) = realify_holomorphic(&m);
        let cb = complexify(&b, &js).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((cb.mu_hol(i, j, k) - m[(i, j, k)]).norm() < 1e-14);
                    assert!(cb.mu_mixed_hol(i, j, k).norm() < 1e-14);
                    assert!(cb.mu_mixed_anti(i, j, k).norm() < 1e-14);
                }
            }
        }
        assert!(cb.consistency_defect() < 1e-14);
        let back = cb.realify().unwrap();
        assert!((back.tensor().max_abs() - b.tensor().max_abs()).abs() < 1e-14);
        let p = complex_structure_predicates(&b, &js).unwrap();
        assert!(p.integrable && !p.abelian && p.bi_invariant);
    }

    #[test]
    fn metric_dictionary_round_trip() {
        let js = ComplexStructure::standard(2);
        let h = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.3, 0.4), c(0.3, -0.4), c(1.5, 0.0)]);
        let g = js.real_metric(&h).unwrap();
        assert!(js.hermitian_residual(&g) < 1e-14);
        let back = js.hermitian_metric(&g).unwrap();
        assert!((back - h).norm() < 1e-14);
    }

    #[test]
    fn identity_real_metric_is_identity_hermitian() {
        let js = ComplexStructure::standard(3);
        let h = js.to_hermitian(&RMatrix::identity(6, 6)).unwrap();
        assert!((h - CMatrix::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn non_adapted_basis_is_rejected() {
        let js = ComplexStructure::standard(2);
        // X_1 = e_0, X_2 = J e_0 spans only a complex line
        let x = RMatrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(
            ComplexStructure::with_basis(js.j().clone(), x),
            Err(Error::NotAdapted)
        );
    }

    #[test]
    fn invalid_j_is_rejected() {
        assert!(ComplexStructure::new(RMatrix::identity(2, 2)).is_err());
        assert!(ComplexStructure::new(RMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn greedy_basis_handles_permuted_j() {
        // J e0 = e1, J e2 = e3
        let mut j = RMatrix::zeros(4, 4);
        j[(1, 0)] = 1.0;
        j[(0, 1)] = -1.0;
        j[(3, 2)] = 1.0;
        j[(2, 3)] = -1.0;
        let js = ComplexStructure::new(j).unwrap();
        assert_eq!(js.basis()[(0, 0)], 1.0);
        assert_eq!(js.basis()[(2, 1)], 1.0);
    }
}
