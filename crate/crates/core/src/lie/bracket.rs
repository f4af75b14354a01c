//! Real Lie brackets stored as structure constants.
//!
//! `c[i][j][k]` is the coefficient of `e_k` in `mu(e_i, e_j)`. Endomorphisms act
//! on column vectors: `E e_i = sum_l E[l][i] e_l`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, RMatrix};
use crate::tensor::Tensor3;
use crate::tol;

/// Structure constants of a real skew-symmetric bilinear map `g x g -> g`.
///
/// Jacobi is not enforced at construction; random antisymmetric brackets are
/// legitimate inputs for the moment-map identities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealBracket {
    c: Tensor3<f64>,
}

impl RealBracket {
    pub fn zero(dim: usize) -> Self {
        Self {
            c: Tensor3::zeros(dim),
        }
    }

    /// Build from a full tensor; fails unless `c[i][j][k] = -c[j][i][k]`.
    pub fn new(c: Tensor3<f64>) -> Result<Self> {
        let n = c.dim();
        let scale = c.max_abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if (c[(i, j, k)] + c[(j, i, k)]).abs() > 1e-12 * scale {
                        return Err(Error::Parse(format!(
                            "structure constants not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(Self { c })
    }

    /// Build from `(i, j, k, value)` entries with `i < j`; the antisymmetric
    /// completion is implied. Repeated entries accumulate.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = Tensor3::zeros(dim);
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: i.max(j).max(k) + 1,
                });
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::Parse(format!("diagonal entry ({i},{i},{k}) must vanish")));
                }
                continue;
            }
            c[(i, j, k)] += v;
            c[(j, i, k)] -= v;
        }
        Ok(Self { c })
    }

    /// Antisymmetrize an arbitrary tensor.
    pub fn antisymmetrized(t: &Tensor3<f64>) -> Self {
        let n = t.dim();
        Self {
            c: Tensor3::from_fn(n, |i, j, k| 0.5 * (t[(i, j, k)] - t[(j, i, k)])),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i, j, k)]
    }

    pub fn tensor(&self) -> &Tensor3<f64> {
        &self.c
    }

    pub fn into_tensor(self) -> Tensor3<f64> {
        self.c
    }

    /// Entries with `i < j` and nonzero value.
    pub fn upper_entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.c[(i, j, k)];
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    /// `mu(x, y)` for coordinate vectors.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.c[(i, j, k)];
                }
            }
        }
        out
    }

    /// Matrix of `ad_{e_i}`.
    pub fn ad(&self, i: usize) -> RMatrix {
        let n = self.dim();
        DMatrix::from_fn(n, n, |row, col| self.c[(i, col, row)])
    }

    /// Matrix of `ad_x`.
    pub fn ad_vec(&self, x: &DVector<f64>) -> RMatrix {
        let n = self.dim();
        let mut m = RMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] != 0.0 {
                m += self.ad(i) * x[i];
            }
        }
        m
    }

    /// Sum of squares of all structure constants (every ordered pair `i, j`).
    pub fn norm_sq(&self) -> f64 {
        self.c.norm_sq()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { c: self.c.scaled(s) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        let mut c = self.c.clone();
        c.add_scaled(1.0, &other.c);
        Ok(Self { c })
    }

    /// Express the bracket in the basis given by the columns of `p`.
    pub fn in_basis(&self, p: &RMatrix) -> Result<Self> {
        let pinv = linalg::inverse(p)?;
        Ok(gl_action_with_inverse(&pinv, p, self))
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Largest Euclidean norm of the Jacobi cyclic sum over basis triples.
pub fn jacobi_residual(b: &RealBracket) -> f64 {
    let n = b.dim();
    let c = b.tensor();
    let mut worst: f64 = 0.0;
    let mut acc = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                acc.iter_mut().for_each(|a| *a = 0.0);
                // mu(mu(x,y),z) + mu(mu(y,z),x) + mu(mu(z,x),y)
                for l in 0..n {
                    let a1 = c[(i, j, l)];
                    let a2 = c[(j, k, l)];
                    let a3 = c[(k, i, l)];
                    if a1 == 0.0 && a2 == 0.0 && a3 == 0.0 {
                        continue;
                    }
                    for (m, slot) in acc.iter_mut().enumerate() {
                        *slot += a1 * c[(l, k, m)] + a2 * c[(l, i, m)] + a3 * c[(l, j, m)];
                    }
                }
                let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
                worst = worst.max(norm);
            }
        }
    }
    worst
}

/// Whether the Jacobi identity holds to `tau_alg` on the unit-normalized bracket.
pub fn is_lie(b: &RealBracket) -> bool {
    let ns = b.norm_sq();
    ns == 0.0 || jacobi_residual(b) <= tol::tau_alg() * ns
}

/// Unimodularity test. The residual is `max_i |tr ad_{e_i}|` divided by `|mu|`.
pub fn is_unimodular(b: &RealBracket) -> (bool, f64) {
    let t = trace_form(b);
    let norm = b.norm();
    let raw = t.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let residual = if norm > 0.0 { raw / norm } else { 0.0 };
    (residual <= tol::tau_alg(), residual)
}

/// The linear form `X -> tr ad_X` as a coordinate vector.
pub fn trace_form(b: &RealBracket) -> DVector<f64> {
    let n = b.dim();
    DVector::from_fn(n, |i, _| (0..n).map(|r| b.get(i, r, r)).sum())
}

/// Killing form `B(e_i, e_j) = tr(ad_i ad_j)`.
pub fn killing_form(b: &RealBracket) -> RMatrix {
    let n = b.dim();
    let c = b.tensor();
    let mut out = RMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for r in 0..n {
                for q in 0..n {
                    s += c[(i, r, q)] * c[(j, q, r)];
                }
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}

/// `pi(E) mu = E mu(., .) - mu(E ., .) - mu(., E .)`, the derivative of the
/// change-of-basis action.
pub fn pi_action(e: &RMatrix, b: &RealBracket) -> Tensor3<f64> {
    let n = b.dim();
    assert_eq!(e.nrows(), n, "endomorphism dimension");
    let c = b.tensor();
    let mut out = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += e[(k, l)] * c[(i, j, l)];
                    s -= e[(l, i)] * c[(l, j, k)];
                    s -= e[(l, j)] * c[(i, l, k)];
                }
                out[(i, j, k)] = s;
            }
        }
    }
    out
}

/// `pi(E) mu` as a bracket (it is antisymmetric whenever `mu` is).
pub fn pi_action_bracket(e: &RMatrix, b: &RealBracket) -> RealBracket {
    RealBracket {
        c: pi_action(e, b),
    }
}

/// Change-of-basis action `(A . mu)(x, y) = A mu(A^{-1} x, A^{-1} y)`.
pub fn gl_action(a: &RMatrix, b: &RealBracket) -> Result<RealBracket> {
    check_dims(b.dim(), a.nrows())?;
    let ainv = linalg::inverse(a)?;
    Ok(gl_action_with_inverse(a, &ainv, b))
}

pub(crate) fn gl_action_with_inverse(a: &RMatrix, ainv: &RMatrix, b: &RealBracket) -> RealBracket {
    let n = b.dim();
    let c = b.tensor();
    // step 1: t1[p][q][k] = sum_l A[k][l] c[p][q][l]
    let mut t1 = Tensor3::<f64>::zeros(n);
    for p in 0..n {
        for q in 0..n {
            for l in 0..n {
                let v = c[(p, q, l)];
                if v == 0.0 {
                    continue;
                }
                for k in 0..n {
                    t1[(p, q, k)] += a[(k, l)] * v;
                }
            }
        }
    }
    // step 2: t2[i][q][k] = sum_p Ainv[p][i] t1[p][q][k]
    let mut t2 = Tensor3::<f64>::zeros(n);
    for p in 0..n {
        for i in 0..n {
            let w = ainv[(p, i)];
            if w == 0.0 {
                continue;
            }
            for q in 0..n {
                for k in 0..n {
                    t2[(i, q, k)] += w * t1[(p, q, k)];
                }
            }
        }
    }
    // step 3: out[i][j][k] = sum_q Ainv[q][j] t2[i][q][k]
    let mut out = Tensor3::zeros(n);
    for q in 0..n {
        for j in 0..n {
            let w = ainv[(q, j)];
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for k in 0..n {
                    out[(i, j, k)] += w * t2[(i, q, k)];
                }
            }
        }
    }
    RealBracket { c: out }
}

/// `<mu, nu>` computed in a `g0`-orthonormal frame, summing over all ordered
/// index pairs. With this normalization `tr M_mu = -1/4 |mu|^2` and the
/// moment-map identity hold exactly.
pub fn bracket_inner_product(b1: &RealBracket, b2: &RealBracket, g0: &RMatrix) -> Result<f64> {
    check_dims(b1.dim(), b2.dim())?;
    check_dims(b1.dim(), g0.nrows())?;
    let e = linalg::orthonormal_frame(g0)?;
    let o1 = b1.in_basis(&e)?;
    let o2 = b2.in_basis(&e)?;
    Ok(o1.tensor().dot(o2.tensor()))
}

/// Bracket norm squared with respect to the inner product `g` on the algebra.
pub fn norm_sq_in_metric(b: &RealBracket, g: &RMatrix) -> Result<f64> {
    bracket_inner_product(b, b, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn so3() -> RealBracket {
        RealBracket::from_entries(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)]).unwrap()
    }

    #[test]
    fn zero_bracket_is_lie_and_unimodular() {
        let z = RealBracket::zero(4);
        assert_eq!(jacobi_residual(&z), 0.0);
        assert!(is_unimodular(&z).0);
        assert_eq!(killing_form(&z), DMatrix::zeros(4, 4));
    }

    #[test]
    fn jacobi_residual_matches_hand_evaluation() {
        // [e0,e1] = e2, [e0,e2] = e1: J(e0,e1,e2) = [e2,e2] + 0 + [-e1,e1] = 0
        let semidirect = RealBracket::from_entries(3, &[(0, 1, 2, 1.0), (0, 2, 1, 1.0)]).unwrap();
        assert_eq!(jacobi_residual(&semidirect), 0.0);
        // [e0,e1] = e1, [e1,e2] = e2: J(e0,e1,e2) = [e1,e2] + [e2,e0] + 0 = e2
        let bad = RealBracket::from_entries(3, &[(0, 1, 1, 1.0), (1, 2, 2, 1.0)]).unwrap();
        assert!((jacobi_residual(&bad) - 1.0).abs() < 1e-15);
        assert!(!is_lie(&bad));
    }

    #[test]
    fn so3_killing_form_is_negative_definite() {
        let b = killing_form(&so3());
        assert!((b - DMatrix::identity(3, 3) * -2.0).norm() < 1e-14);
        assert!(jacobi_residual(&so3()) < 1e-15);
    }

    #[test]
    fn pi_of_identity_is_minus_mu() {
        let b = so3();
        let p = pi_action(&DMatrix::identity(3, 3), &b);
        let mut sum = p.clone();
        sum.add_scaled(1.0, b.tensor());
        assert!(sum.max_abs() < 1e-15);
    }

    #[test]
    fn gl_action_identity_and_scaling() {
        let b = so3();
        let same = gl_action(&DMatrix::identity(3, 3), &b).unwrap();
        assert_eq!(same, b);
        // (c Id) . mu = c^{-1} mu
        let scaled = gl_action(&(DMatrix::identity(3, 3) * 4.0), &b).unwrap();
        assert!((scaled.norm() - b.norm() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn singular_gl_action_is_rejected() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(gl_action(&a, &so3()), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let r = bracket_inner_product(&so3(), &RealBracket::zero(4), &DMatrix::identity(3, 3));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn unimodular_residual_detects_trace() {
        // [e0, e1] = e1: tr ad_{e0} = 1
        let b = RealBracket::from_entries(2, &[(0, 1, 1, 1.0)]).unwrap();
        let (ok, res) = is_unimodular(&b);
        assert!(!ok);
        // raw trace 1, |mu| = sqrt(2)
        assert!((res - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
