//! Subspace computations: center, lower central and derived series, ideals.
//!
//! Subspaces are represented by orthonormal bases (Euclidean in coordinates).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::lie::bracket::RealBracket;
use crate::linalg::{self, RMatrix};
use crate::tol;

pub type Subspace = Vec<DVector<f64>>;

const REL: f64 = 1e-10;

fn full_space(n: usize) -> Subspace {
    (0..n)
        .map(|i| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }))
        .collect()
}

/// `span { mu(x, y) : x in a, y in b }`.
pub fn bracket_span(b: &RealBracket, a: &Subspace, c: &Subspace) -> Subspace {
    let cutoff = REL * b.norm();
    let mut vs = Vec::with_capacity(a.len() * c.len());
    for x in a {
        for y in c {
            let v = b.apply(x, y);
            if v.norm() > cutoff {
                vs.push(v);
            }
        }
    }
    linalg::column_span(&vs, REL)
}

/// Center as the common kernel of all `ad_{e_i}` transposed maps.
pub fn center(b: &RealBracket) -> Subspace {
    let n = b.dim();
    // z in center iff mu(z, e_i) = 0 for all i: stack ad-like maps
    let mut m = RMatrix::zeros(n * n, n);
    for i in 0..n {
        for z in 0..n {
            for k in 0..n {
                m[(i * n + k, z)] = b.get(z, i, k);
            }
        }
    }
    let scale = b.tensor().max_abs();
    if scale == 0.0 {
        return full_space(n);
    }
    linalg::kernel(&m, tol::SVD_KERNEL_REL)
}

/// `g, [g,g], [g,[g,g]], ...` until stabilization.
pub fn lower_central_series(b: &RealBracket) -> Vec<Subspace> {
    let full = full_space(b.dim());
    let mut out = vec![full.clone()];
    loop {
        let last = out.last().unwrap();
        let next = bracket_span(b, &full, last);
        if next.len() == last.len() {
            break;
        }
        let stop = next.is_empty();
        out.push(next);
        if stop {
            break;
        }
    }
    out
}

/// `g, [g,g], [[g,g],[g,g]], ...` until stabilization.
pub fn derived_series(b: &RealBracket) -> Vec<Subspace> {
    let mut out = vec![full_space(b.dim())];
    loop {
        let last = out.last().unwrap();
        let next = bracket_span(b, last, last);
        if next.len() == last.len() {
            break;
        }
        let stop = next.is_empty();
        out.push(next);
        if stop {
            break;
        }
    }
    out
}

pub fn is_nilpotent(b: &RealBracket) -> bool {
    lower_central_series(b).last().map_or(true, |s| s.is_empty())
}

pub fn is_solvable(b: &RealBracket) -> bool {
    derived_series(b).last().map_or(true, |s| s.is_empty())
}

/// Distance of `v` from the subspace spanned by the orthonormal set `s`.
pub fn distance_to(v: &DVector<f64>, s: &Subspace) -> f64 {
    let mut r = v.clone();
    for e in s {
        r -= e * e.dot(v);
    }
    r.norm()
}

/// Check that `s` is an abelian ideal: `mu(g, s) in s` and `mu(s, s) = 0`.
/// Residuals are relative to `|mu|`.
pub fn check_abelian_ideal(b: &RealBracket, s: &Subspace) -> Result<()> {
    let n = b.dim();
    let scale = b.norm().max(f64::MIN_POSITIVE);
    let tau = tol::tau_alg();
    let full = full_space(n);
    let mut ideal_res: f64 = 0.0;
    for x in &full {
        for y in s {
            ideal_res = ideal_res.max(distance_to(&b.apply(x, y), s));
        }
    }
    if ideal_res / scale > tau {
        return Err(Error::NotAnIdeal {
            residual: ideal_res / scale,
        });
    }
    let mut ab_res: f64 = 0.0;
    for x in s {
        for y in s {
            ab_res = ab_res.max(b.apply(x, y).norm());
        }
    }
    if ab_res / scale > tau {
        return Err(Error::NotAbelianIdeal {
            residual: ab_res / scale,
        });
    }
    Ok(())
}

/// Orthonormalize arbitrary spanning vectors.
pub fn span_of(vs: &[DVector<f64>]) -> Subspace {
    linalg::column_span(vs, REL)
}

/// Dimension of `z ∩ J z` for the given subspace `z`.
pub fn intersection_with_image(z: &Subspace, j: &RMatrix) -> usize {
    if z.is_empty() {
        return 0;
    }
    let jz: Vec<DVector<f64>> = z.iter().map(|v| j * v).collect();
    let mut all = z.clone();
    all.extend(jz.iter().cloned());
    let sum_dim = linalg::rank_of(&all, REL);
    let jz_dim = linalg::rank_of(&jz, REL);
    z.len() + jz_dim - sum_dim
}

/// Candidate abelian ideals: the center, the last nonzero term of the lower
/// central series and of the derived series. Only verified ones are returned.
pub fn abelian_ideal_candidates(b: &RealBracket) -> Vec<Subspace> {
    let mut cands: Vec<Subspace> = Vec::new();
    let z = center(b);
    if !z.is_empty() {
        cands.push(z);
    }
    for series in [lower_central_series(b), derived_series(b)] {
        if let Some(last) = series.iter().rev().find(|s| !s.is_empty()) {
            if last.len() < b.dim() || b.norm() == 0.0 {
                cands.push(last.clone());
            }
        }
    }
    cands
        .into_iter()
        .filter(|s| check_abelian_ideal(b, s).is_ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis() -> RealBracket {
        RealBracket::from_entries(3, &[(0, 1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn heisenberg_structure() {
        let b = heis();
        let z = center(&b);
        assert_eq!(z.len(), 1);
        assert!((z[0][2].abs() - 1.0).abs() < 1e-12);
        assert!(is_nilpotent(&b));
        assert_eq!(lower_central_series(&b).len(), 3);
        assert!(check_abelian_ideal(&b, &z).is_ok());
    }

    #[test]
    fn non_ideal_is_rejected() {
        let b = heis();
        let s = span_of(&[DVector::from_vec(vec![1.0, 0.0, 0.0])]);
        assert!(matches!(check_abelian_ideal(&b, &s), Err(Error::NotAnIdeal { .. })));
    }

    #[test]
    fn affine_line_is_solvable_not_nilpotent() {
        let b = RealBracket::from_entries(2, &[(0, 1, 1, 1.0)]).unwrap();
        assert!(!is_nilpotent(&b));
        assert!(is_solvable(&b));
        assert!(center(&b).is_empty());
    }
}
