//! Metric flows `d/dt g = -P(g)` on the components of `g` in the reference
//! frame.

use num_complex::Complex64;

use super::integrator::System;
use crate::error::Result;
use crate::hermitian::{self, HermitianMetric};
use crate::lie::{ComplexFrameBracket, ComplexStructure, RealBracket};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::riemannian;
use crate::tol;

/// `[Re h (row-major), Im h (row-major)]`.
pub fn pack_hermitian(h: &CMatrix) -> Vec<f64> {
    let n = h.nrows();
    let mut v = Vec::with_capacity(2 * n * n);
    for r in 0..n {
        for c in 0..n {
            v.push(h[(r, c)].re);
        }
    }
    for r in 0..n {
        for c in 0..n {
            v.push(h[(r, c)].im);
        }
    }
    v
}

pub fn unpack_hermitian(y: &[f64], n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |r, c| Complex64::new(y[r * n + c], y[n * n + r * n + c]))
}

pub fn pack_real(g: &RMatrix) -> Vec<f64> {
    let n = g.nrows();
    (0..n * n).map(|i| g[(i / n, i % n)]).collect()
}

pub fn unpack_real(y: &[f64], n: usize) -> RMatrix {
    RMatrix::from_row_slice(n, n, y)
}

fn ratio_ok(min: f64, max: f64) -> bool {
    min > 0.0 && max.is_finite() && min > tol::DEGENERATE_RATIO * max * 1e-3
}

#[derive(Clone, Copy, Debug)]
pub enum HermitianOperator {
    Kx([f64; 4]),
    Ric11,
}

/// `d/dt h = -K^x(h)` or `-Ric^{1,1}(h)`, as Hermitian matrices in the
/// reference frame.
pub struct HermitianFlow {
    pub bracket: RealBracket,
    pub js: ComplexStructure,
    pub complex: ComplexFrameBracket,
    pub op: HermitianOperator,
}

impl HermitianFlow {
    pub fn n(&self) -> usize {
        self.js.complex_dim()
    }

    pub fn operator(&self, h: &CMatrix) -> Result<CMatrix> {
        let h = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
        match self.op {
            HermitianOperator::Kx(x) => {
                hermitian::kx_reference(&self.complex, &HermitianMetric::new(h)?, &x)
            }
            HermitianOperator::Ric11 => riemannian::ric11_hermitian(&self.bracket, &self.js, &h),
        }
    }
}

impl System for HermitianFlow {
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let k = self.operator(&unpack_hermitian(y, self.n()))?;
        let k = (&k + k.adjoint()) * Complex64::new(-0.5, 0.0);
        dy.copy_from_slice(&pack_hermitian(&k));
        Ok(())
    }

    fn admissible(&self, y: &[f64]) -> bool {
        let (min, max) = linalg::herm_eig_range(&unpack_hermitian(y, self.n()));
        ratio_ok(min, max)
    }

    fn project(&self, y: &mut [f64]) {
        let h = unpack_hermitian(y, self.n());
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        y.copy_from_slice(&pack_hermitian(&h));
    }
}

/// `d/dt g = -M(g)` on a real metric.
pub struct MFlow {
    pub bracket: RealBracket,
}

impl System for MFlow {
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let n = self.bracket.dim();
        let g = unpack_real(y, n);
        let g = (&g + g.transpose()) * 0.5;
        let m = riemannian::m_tensor(&self.bracket, &g)?;
        dy.copy_from_slice(&pack_real(&(m * -1.0)));
        Ok(())
    }

    fn admissible(&self, y: &[f64]) -> bool {
        let (min, max) = linalg::sym_eig_range(&unpack_real(y, self.bracket.dim()));
        ratio_ok(min, max)
    }

    fn project(&self, y: &mut [f64]) {
        let n = self.bracket.dim();
        let g = unpack_real(y, n);
        y.copy_from_slice(&pack_real(&((&g + g.transpose()) * 0.5)));
    }
}
