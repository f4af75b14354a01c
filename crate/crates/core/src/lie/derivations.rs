use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::lie::bracket::{pi_action, RealBracket};
use crate::linalg::{self, RMatrix};
use crate::tol;

/// Orthonormal basis (Frobenius inner product) of `Der(g)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivationSpace {
    pub basis: Vec<RMatrix>,
    pub tolerance: f64,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection of `e` onto the space.
    pub fn project(&self, e: &RMatrix) -> RMatrix {
        let mut out = RMatrix::zeros(e.nrows(), e.ncols());
        for d in &self.basis {
            out += d * d.dot(e);
        }
        out
    }
}

/// Matrix of `E -> pi(E) mu` from `gl(n)` (column-major flattening of `E`)
/// to the flattened tensor space.
pub fn pi_matrix(b: &RealBracket) -> RMatrix {
    let n = b.dim();
    let mut m = RMatrix::zeros(n * n * n, n * n);
    for col in 0..n {
        for row in 0..n {
            let mut e = RMatrix::zeros(n, n);
            e[(row, col)] = 1.0;
            let t = pi_action(&e, b);
            let idx = col * n + row;
            for (k, v) in t.as_slice().iter().enumerate() {
                m[(k, idx)] = *v;
            }
        }
    }
    m
}

/// Kernel of `E -> pi(E) mu` by singular-value thresholding.
pub fn derivation_space(b: &RealBracket) -> DerivationSpace {
    let n = b.dim();
    let rel = tol::SVD_KERNEL_REL;
    if n == 0 {
        return DerivationSpace {
            basis: Vec::new(),
            tolerance: rel,
        };
    }
    let m = pi_matrix(b);
    let kernel: Vec<DVector<f64>> = linalg::kernel(&m, rel);
    let basis = kernel
        .into_iter()
        .map(|v| RMatrix::from_column_slice(n, n, v.as_slice()))
        .collect();
    DerivationSpace {
        basis,
        tolerance: rel,
    }
}

/// `|pi(E) mu| / |mu|`, or `|pi(E) mu|` for the zero bracket.
pub fn derivation_residual(e: &RMatrix, b: &RealBracket) -> f64 {
    let r = pi_action(e, b).norm_sq().sqrt();
    let nm = b.norm();
    if nm > 0.0 {
        r / nm
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_derivations_are_everything() {
        let ds = derivation_space(&RealBracket::zero(3));
        assert_eq!(ds.dim(), 9);
    }

    #[test]
    fn real_heisenberg_derivations() {
        // [e0, e1] = e2: Der has dimension 6
        let b = RealBracket::from_entries(3, &[(0, 1, 2, 1.0)]).unwrap();
        let ds = derivation_space(&b);
        assert_eq!(ds.dim(), 6);
        for d in &ds.basis {
            assert!(derivation_residual(d, &b) < 1e-12);
        }
        let diag = RMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        assert!(derivation_residual(&diag, &b) < 1e-14);
        assert!((ds.project(&diag) - &diag).norm() < 1e-12);
    }
}
