//! Classification of how a flow ended: horizon, convergence or blow-up.

use serde::Serialize;

use super::FlowSample;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    ReachedHorizon,
    /// Blow-up time estimate with a one-sigma error bar from the fit.
    Singularity { t_est: f64, t_err: f64, last_t: f64 },
    /// The fixed-point residual stayed below the threshold from `t` on.
    Converged { t: f64, residual: f64 },
    StepLimit { last_t: f64 },
}

impl Termination {
    pub fn is_singularity(&self) -> bool {
        matches!(self, Termination::Singularity { .. })
    }
}

/// Number of trailing samples whose fixed-point residual is below the threshold.
pub fn converged_run(samples: &[FlowSample]) -> usize {
    samples
        .iter()
        .rev()
        .take_while(|s| s.fixed_point_residual.is_some_and(|r| r <= tol::TOL_FIX))
        .count()
}

/// Least-squares fit of `y = dt / d(log m)` against `t` over the last
/// [`tol::SINGULARITY_FIT_WINDOW`] samples, where `m` is the degeneracy
/// measure of each sample. For `m ~ c (T - t)^p` the fit is the line
/// `(t - T) / p`, whose root is the blow-up time.
pub fn fit_blowup(samples: &[FlowSample]) -> Option<(f64, f64)> {
    let w = tol::SINGULARITY_FIT_WINDOW.min(samples.len());
    let tail = &samples[samples.len() - w..];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for pair in tail.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let dl = b.degeneracy.ln() - a.degeneracy.ln();
        let dt = b.t - a.t;
        if dl != 0.0 && dl.is_finite() && dt != 0.0 {
            xs.push(0.5 * (a.t + b.t));
            ys.push(dt / dl);
        }
    }
    let k = xs.len();
    if k < 3 {
        return None;
    }
    let kf = k as f64;
    let xm = xs.iter().sum::<f64>() / kf;
    let ym = ys.iter().sum::<f64>() / kf;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let beta = sxy / sxx;
    let alpha = ym - beta * xm;
    if beta == 0.0 {
        return None;
    }
    let t_est = -alpha / beta;
    let s2 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - alpha - beta * x).powi(2))
        .sum::<f64>()
        / (kf - 2.0);
    let var_b = s2 / sxx;
    let var_a = s2 * (1.0 / kf + xm * xm / sxx);
    let cov = -xm * s2 / sxx;
    let da = -1.0 / beta;
    let db = alpha / (beta * beta);
    let var_t = da * da * var_a + db * db * var_b + 2.0 * da * db * cov;
    Some((t_est, var_t.max(0.0).sqrt()))
}

/// Classify a finished trace. `hit_limit` marks an integration stopped by the
/// step budget.
pub fn detect_termination(samples: &[FlowSample], t_end: f64, hit_limit: bool) -> Termination {
    let last = match samples.last() {
        Some(s) => s,
        None => return Termination::ReachedHorizon,
    };
    let run = converged_run(samples);
    if run >= tol::CONVERGENCE_DWELL || (run > 0 && run == samples.len() && last.t == t_end) {
        let first = &samples[samples.len() - run];
        return Termination::Converged {
            t: first.t,
            residual: last.fixed_point_residual.unwrap_or(0.0),
        };
    }
    if last.t == t_end {
        return Termination::ReachedHorizon;
    }
    if hit_limit {
        return Termination::StepLimit { last_t: last.t };
    }
    let (t_est, t_err) = fit_blowup(samples).unwrap_or((last.t, f64::INFINITY));
    Termination::Singularity {
        t_est,
        t_err,
        last_t: last.t,
    }
}
