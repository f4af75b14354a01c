//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Ratio of smallest to largest eigenvalue of a real symmetric matrix.
/// Returns `(min, max)`.
pub fn sym_eig_range(m: &RMatrix) -> (f64, f64) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym).eigenvalues;
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Eigenvalue range of a Hermitian matrix.
pub fn herm_eig_range(h: &CMatrix) -> (f64, f64) {
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym).eigenvalues;
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Sorted eigenvalues of a real symmetric matrix.
pub fn sym_eigenvalues(m: &RMatrix) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn check_ratio(min: f64, max: f64) -> Result<()> {
    if !(max > 0.0) || !(min > tol::DEGENERATE_RATIO * max) {
        let ratio = if max > 0.0 { min / max } else { f64::NAN };
        return Err(Error::NotPositiveDefinite { ratio });
    }
    Ok(())
}

/// Reject real symmetric matrices that are not (numerically) positive definite.
pub fn ensure_positive_definite(g: &RMatrix) -> Result<()> {
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotPositiveDefinite { ratio: f64::NAN });
    }
    let (min, max) = sym_eig_range(g);
    check_ratio(min, max)
}

/// Reject Hermitian matrices that are not (numerically) positive definite.
pub fn ensure_positive_definite_herm(h: &CMatrix) -> Result<()> {
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NotPositiveDefinite { ratio: f64::NAN });
    }
    let (min, max) = herm_eig_range(h);
    check_ratio(min, max)
}

/// Columns form a `g`-orthonormal basis: `E^T g E = I`. Derived from the lower
/// Cholesky factor, so `E` is upper triangular.
pub fn orthonormal_frame(g: &RMatrix) -> Result<RMatrix> {
    ensure_positive_definite(g)?;
    let sym = (g + g.transpose()) * 0.5;
    let chol = sym
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { ratio: 0.0 })?;
    let l = chol.l();
    let linv = l
        .try_inverse()
        .ok_or(Error::SingularMatrix { condition: f64::INFINITY })?;
    Ok(linv.transpose())
}

/// Invert a real matrix, reporting singularity relative to its scale.
pub fn inverse(a: &RMatrix) -> Result<RMatrix> {
    let n = a.nrows();
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if n == 0 {
        return Ok(a.clone());
    }
    if !(condition < 1e14) {
        return Err(Error::SingularMatrix { condition });
    }
    a.clone()
        .try_inverse()
        .ok_or(Error::SingularMatrix { condition })
}

pub fn inverse_c(a: &CMatrix) -> Result<CMatrix> {
    a.clone()
        .try_inverse()
        .ok_or(Error::SingularMatrix { condition: f64::INFINITY })
}

/// Orthonormal basis (as columns) of the numerical kernel of `a`, where singular
/// values below `rel * sigma_max` count as zero.
pub fn kernel(a: &RMatrix, rel: f64) -> Vec<DVector<f64>> {
    let (m, n) = a.shape();
    if n == 0 {
        return Vec::new();
    }
    // pad so the SVD returns a full set of right singular vectors
    let padded = if m < n {
        let mut p = RMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    let cutoff = rel * smax;
    let mut basis = Vec::new();
    for (idx, s) in svd.singular_values.iter().enumerate() {
        if smax == 0.0 || *s <= cutoff {
            basis.push(vt.row(idx).transpose());
        }
    }
    basis
}

/// Numerical rank of a set of column vectors.
pub fn rank_of(vectors: &[DVector<f64>], rel: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = RMatrix::from_columns(vectors);
    let svd = m.svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|s| **s > rel * smax).count()
}

/// Orthonormal basis of the column span, by SVD.
pub fn column_span(vectors: &[DVector<f64>], rel: f64) -> Vec<DVector<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = RMatrix::from_columns(vectors);
    let svd = m.svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.max();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| smax > 0.0 && **s > rel * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect()
}

pub fn frobenius(m: &RMatrix) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn frobenius_c(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Distance from Hermitian: `max |m - m^*|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    d.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| c(x, 0.0))
}

/// Matrix exponential of a real square matrix.
pub fn expm(m: &RMatrix) -> RMatrix {
    m.clone().exp()
}
