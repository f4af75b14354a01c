//! Metric flows (HCF, `K^x`, `M`, `Ric^{1,1}`) and bracket flows, with
//! monitors, blow-up detection and convergence detection.
//!
//! Metric flows evolve the components of the metric in the algebra's reference
//! frame: the Hermitian matrix `h_ab = g(Z_a, Zbar_b)` for the Chern-side
//! flows, the real Gram matrix for the `M`-flow. Bracket flows evolve the
//! structure constants in orthonormal coordinates of the initial metric. The
//! bracket flow `d/dt mu = -pi(M_mu) mu` corresponds to `d/dt g = -2 M(g)`, so
//! it agrees with the `M`-flow up to doubling time.

pub mod bracket;
pub mod integrator;
pub mod metric;
pub mod termination;
pub mod trace;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::HCF;
use crate::lie::{complexify, Algebra, RealBracket};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::riemannian::m_orthonormal;
use crate::tensor::Tensor3;
use crate::tol;

pub use integrator::{Control, IntegratorSettings, Outcome, StepStats};
pub use termination::{detect_termination, fit_blowup, Termination};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "name", content = "x", rename_all = "snake_case")]
pub enum FlowKind {
    Hcf,
    Kx([f64; 4]),
    MFlow,
    Ric11Flow,
    BracketFlow,
    NormalizedBracketFlow,
}

impl FlowKind {
    pub fn needs_complex_structure(&self) -> bool {
        matches!(self, FlowKind::Hcf | FlowKind::Kx(_) | FlowKind::Ric11Flow)
    }

    pub fn is_bracket_flow(&self) -> bool {
        matches!(self, FlowKind::BracketFlow | FlowKind::NormalizedBracketFlow)
    }
}

/// How the state vector is laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLayout {
    /// `n x n` Hermitian matrix: real parts then imaginary parts, row-major.
    Hermitian { n: usize },
    /// `n x n` real symmetric matrix, row-major.
    RealSymmetric { n: usize },
    /// Full `c[i][j][k]`, row-major.
    Bracket { n: usize },
}

#[derive(Clone, Debug)]
pub struct FlowProblem {
    pub algebra: Algebra,
    /// Initial real metric (`J`-Hermitian for the Chern-side flows).
    pub metric: RMatrix,
    pub kind: FlowKind,
    pub t0: f64,
    pub t_end: f64,
    pub settings: IntegratorSettings,
}

impl FlowProblem {
    pub fn new(algebra: Algebra, metric: RMatrix, kind: FlowKind, t_end: f64) -> Self {
        Self {
            algebra,
            metric,
            kind,
            t0: 0.0,
            t_end,
            settings: IntegratorSettings::default(),
        }
    }

    /// Initial metric given as the Hermitian matrix in the reference frame.
    pub fn with_hermitian(algebra: Algebra, h: &CMatrix, kind: FlowKind, t_end: f64) -> Result<Self> {
        let g = algebra.complex_structure()?.real_metric(h)?;
        Ok(Self::new(algebra, g, kind, t_end))
    }
}

/// One accepted state with its monitors.
#[derive(Clone, Debug, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub state: Vec<f64>,
    /// `|mu|^2` in an orthonormal frame of the current metric (or of the
    /// background metric for bracket flows).
    pub mu_norm_sq: f64,
    pub m_norm_sq: f64,
    /// `|M_mu|^2 / |mu|^4`.
    pub f: f64,
    /// `4 F`, the value of `r_nu` at `nu = mu / |mu|`.
    pub r_nu: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    /// Positive measure that tends to zero at a singularity: `min_eig /
    /// max_eig` for metric flows, `1 / (1 + |mu|^2)` for bracket flows.
    pub degeneracy: f64,
    /// `|pi(M_nu + r_nu Id) nu|` for the normalized bracket flow.
    pub fixed_point_residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowTrace {
    pub algebra: String,
    pub kind: FlowKind,
    pub layout: StateLayout,
    pub t0: f64,
    pub t_end: f64,
    pub settings: IntegratorSettings,
    pub stats: StepStats,
    pub outcome: Outcome,
    pub termination: Termination,
    pub samples: Vec<FlowSample>,
}

impl FlowTrace {
    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("traces hold the initial sample")
    }

    /// Hermitian metric of a sample (Chern-side flows).
    pub fn hermitian_at(&self, idx: usize) -> Option<CMatrix> {
        match self.layout {
            StateLayout::Hermitian { n } => Some(metric::unpack_hermitian(&self.samples[idx].state, n)),
            _ => None,
        }
    }

    /// Real metric of a sample (`M`-flow).
    pub fn real_metric_at(&self, idx: usize) -> Option<RMatrix> {
        match self.layout {
            StateLayout::RealSymmetric { n } => Some(metric::unpack_real(&self.samples[idx].state, n)),
            _ => None,
        }
    }

    /// Bracket of a sample (bracket flows).
    pub fn bracket_at(&self, idx: usize) -> Option<RealBracket> {
        match self.layout {
            StateLayout::Bracket { n } => Some(RealBracket::antisymmetrized(&Tensor3::from_vec(
                n,
                self.samples[idx].state.clone(),
            ))),
            _ => None,
        }
    }

    pub fn final_bracket(&self) -> Option<RealBracket> {
        self.bracket_at(self.samples.len() - 1)
    }

    /// `(|d/dt |mu|^2 + 8 |M|^2|) / (8 |M|^2)` between consecutive samples,
    /// using the trapezoidal average of `|M|^2` over each step.
    pub fn norm_law_errors(&self) -> Vec<f64> {
        self.samples
            .windows(2)
            .filter_map(|w| {
                let dt = w[1].t - w[0].t;
                if dt == 0.0 {
                    return None;
                }
                let fd = (w[1].mu_norm_sq - w[0].mu_norm_sq) / dt;
                let rhs = -4.0 * (w[0].m_norm_sq + w[1].m_norm_sq);
                Some(if rhs == 0.0 { fd.abs() } else { ((fd - rhs) / rhs).abs() })
            })
            .collect()
    }

    /// Largest increase of `F` between consecutive samples.
    pub fn max_f_increase(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[1].f - w[0].f)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn bracket_monitors(mu: &RealBracket) -> (f64, f64, f64) {
    let ns = mu.norm_sq();
    let m = m_orthonormal(mu);
    let ms = m.norm_squared();
    let f = if ns > 0.0 { ms / (ns * ns) } else { 0.0 };
    (ns, ms, f)
}

fn sample_metric(b: &RealBracket, g: &RMatrix, t: f64, state: &[f64], eig: (f64, f64)) -> Result<FlowSample> {
    let e = linalg::orthonormal_frame(g)?;
    let mu = b.in_basis(&e)?;
    let (ns, ms, f) = bracket_monitors(&mu);
    Ok(FlowSample {
        t,
        state: state.to_vec(),
        mu_norm_sq: ns,
        m_norm_sq: ms,
        f,
        r_nu: 4.0 * f,
        min_eig: eig.0,
        max_eig: eig.1,
        degeneracy: eig.0 / eig.1,
        fixed_point_residual: None,
    })
}

/// Integrate the problem and classify its end.
pub fn integrate(p: &FlowProblem) -> Result<FlowTrace> {
    let b = &p.algebra.bracket;
    let n_r = b.dim();
    if p.metric.nrows() != n_r || p.metric.ncols() != n_r {
        return Err(Error::DimensionMismatch {
            expected: n_r,
            got: p.metric.nrows(),
        });
    }
    linalg::ensure_positive_definite(&p.metric)?;
    let mut samples: Vec<FlowSample> = Vec::new();
    let mut failure: Option<Error> = None;

    let (layout, outcome, stats) = match p.kind {
        FlowKind::Hcf | FlowKind::Kx(_) | FlowKind::Ric11Flow => {
            let js = p
                .algebra
                .j
                .clone()
                .ok_or_else(|| Error::IncompatibleFlow("flow needs a complex structure".into()))?;
            let h0 = js.hermitian_metric(&p.metric)?;
            let op = match p.kind {
                FlowKind::Hcf => metric::HermitianOperator::Kx(HCF),
                FlowKind::Kx(x) => metric::HermitianOperator::Kx(x),
                _ => metric::HermitianOperator::Ric11,
            };
            let sys = metric::HermitianFlow {
                bracket: b.clone(),
                complex: complexify(b, &js)?,
                js: js.clone(),
                op,
            };
            let n = js.complex_dim();
            let y0 = metric::pack_hermitian(&h0);
            let (outcome, stats) = integrator::integrate(&sys, p.t0, &y0, p.t_end, &p.settings, |t, y| {
                let h = metric::unpack_hermitian(y, n);
                let eig = linalg::herm_eig_range(&h);
                let s = js.real_metric(&h).and_then(|g| sample_metric(b, &g, t, y, eig));
                match s {
                    Ok(s) => {
                        let stop = s.degeneracy <= tol::DEGENERATE_RATIO;
                        samples.push(s);
                        if stop {
                            Control::Stop
                        } else {
                            Control::Continue
                        }
                    }
                    Err(e) => {
                        failure = Some(e);
                        Control::Stop
                    }
                }
            })?;
            (StateLayout::Hermitian { n }, outcome, stats)
        }
        FlowKind::MFlow => {
            let sys = metric::MFlow { bracket: b.clone() };
            let y0 = metric::pack_real(&p.metric);
            let (outcome, stats) = integrator::integrate(&sys, p.t0, &y0, p.t_end, &p.settings, |t, y| {
                let g = metric::unpack_real(y, n_r);
                let eig = linalg::sym_eig_range(&g);
                match sample_metric(b, &g, t, y, eig) {
                    Ok(s) => {
                        let stop = s.degeneracy <= tol::DEGENERATE_RATIO;
                        samples.push(s);
                        if stop {
                            Control::Stop
                        } else {
                            Control::Continue
                        }
                    }
                    Err(e) => {
                        failure = Some(e);
                        Control::Stop
                    }
                }
            })?;
            (StateLayout::RealSymmetric { n: n_r }, outcome, stats)
        }
        FlowKind::BracketFlow | FlowKind::NormalizedBracketFlow => {
            let normalized = p.kind == FlowKind::NormalizedBracketFlow;
            let e = linalg::orthonormal_frame(&p.metric)?;
            let mut mu0 = b.in_basis(&e)?;
            if normalized {
                let nm = mu0.norm();
                if nm == 0.0 {
                    return Err(Error::ZeroBracket);
                }
                mu0 = mu0.scaled(1.0 / nm);
            }
            let sys = bracket::BracketFlow { dim: n_r, normalized };
            let y0 = mu0.tensor().as_slice().to_vec();
            let mut run = 0usize;
            let (outcome, stats) = integrator::integrate(&sys, p.t0, &y0, p.t_end, &p.settings, |t, y| {
                let mu = RealBracket::antisymmetrized(&Tensor3::from_vec(n_r, y.to_vec()));
                let (ns, ms, f) = bracket_monitors(&mu);
                let fpr = if normalized {
                    Some(bracket::normalized_velocity(&mu).norm_sq().sqrt())
                } else {
                    None
                };
                samples.push(FlowSample {
                    t,
                    state: y.to_vec(),
                    mu_norm_sq: ns,
                    m_norm_sq: ms,
                    f,
                    r_nu: 4.0 * f,
                    min_eig: 1.0,
                    max_eig: 1.0,
                    degeneracy: 1.0 / (1.0 + ns),
                    fixed_point_residual: fpr,
                });
                if fpr.is_some_and(|r| r <= tol::TOL_FIX) {
                    run += 1;
                } else {
                    run = 0;
                }
                if run >= tol::CONVERGENCE_DWELL || !ns.is_finite() || ns > 1e300 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            })?;
            (StateLayout::Bracket { n: n_r }, outcome, stats)
        }
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let termination = detect_termination(&samples, p.t_end, outcome == Outcome::MaxSteps);
    Ok(FlowTrace {
        algebra: p.algebra.name.clone(),
        kind: p.kind,
        layout,
        t0: p.t0,
        t_end: p.t_end,
        settings: p.settings,
        stats,
        outcome,
        termination,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::ComplexStructure;

    #[test]
    fn abelian_metric_is_constant() {
        let alg = Algebra::new("ab", RealBracket::zero(4), Some(ComplexStructure::standard(2)));
        let g = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 1.0, 2.0]));
        let tr = integrate(&FlowProblem::new(alg, g.clone(), FlowKind::Hcf, 5.0)).unwrap();
        assert_eq!(tr.termination, Termination::ReachedHorizon);
        let h = tr.hermitian_at(tr.samples.len() - 1).unwrap();
        assert!((h[(1, 1)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn normalized_flow_needs_nonzero_bracket() {
        let alg = Algebra::new("ab", RealBracket::zero(2), None);
        let p = FlowProblem::new(alg, RMatrix::identity(2, 2), FlowKind::NormalizedBracketFlow, 1.0);
        assert_eq!(integrate(&p).unwrap_err(), Error::ZeroBracket);
    }

    #[test]
    fn ric11_flow_needs_j() {
        let alg = Algebra::new("h", RealBracket::from_entries(3, &[(0, 1, 2, 1.0)]).unwrap(), None);
        let p = FlowProblem::new(alg, RMatrix::identity(3, 3), FlowKind::Ric11Flow, 1.0);
        assert!(matches!(integrate(&p), Err(Error::IncompatibleFlow(_))));
    }
}
