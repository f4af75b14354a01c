//! Bracket flows `d/dt mu = -pi(M_mu) mu` and the unit-norm version
//! `d/dt nu = -pi(M_nu + r_nu Id) nu`, with brackets in orthonormal
//! coordinates of a fixed background metric.

use super::integrator::System;
use crate::error::Result;
use crate::lie::{pi_action, RealBracket};
use crate::linalg::RMatrix;
use crate::riemannian::m_orthonormal;
use crate::tensor::Tensor3;

fn as_bracket(y: &[f64], n: usize) -> RealBracket {
    RealBracket::antisymmetrized(&Tensor3::from_vec(n, y.to_vec()))
}

/// `r_nu = <pi(M_nu) nu, nu> / |nu|^2 = 4 |M_nu|^2 / |nu|^2`; with this choice
/// the norm is conserved exactly along the continuous flow.
pub fn r_nu(m: &RMatrix, nu_norm_sq: f64) -> f64 {
    if nu_norm_sq == 0.0 {
        0.0
    } else {
        4.0 * m.norm_squared() / nu_norm_sq
    }
}

/// `pi(M_nu + r Id) nu` for the given bracket.
pub fn normalized_velocity(nu: &RealBracket) -> Tensor3<f64> {
    let n = nu.dim();
    let m = m_orthonormal(nu);
    let r = r_nu(&m, nu.norm_sq());
    pi_action(&(m + RMatrix::identity(n, n) * r), nu)
}

pub struct BracketFlow {
    pub dim: usize,
    pub normalized: bool,
}

impl System for BracketFlow {
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let mu = as_bracket(y, self.dim);
        let v = if self.normalized {
            normalized_velocity(&mu)
        } else {
            pi_action(&m_orthonormal(&mu), &mu)
        };
        for (d, x) in dy.iter_mut().zip(v.as_slice()) {
            *d = -x;
        }
        Ok(())
    }

    fn project(&self, y: &mut [f64]) {
        if self.normalized {
            let s = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if s > 0.0 {
                y.iter_mut().for_each(|v| *v /= s);
            }
        }
    }
}
