//! Dormand-Prince 5(4) with adaptive steps, FSAL and step rejection when the
//! trial state leaves the admissible region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Right-hand side of `y' = f(t, y)` with an admissible region.
pub trait System {
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;

    /// `false` rejects a trial step (e.g. the metric lost positivity).
    fn admissible(&self, _y: &[f64]) -> bool {
        true
    }

    /// Applied to every accepted state.
    fn project(&self, _y: &mut [f64]) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    /// Steps below `h_min_rel * max(1, |t|)` count as a collapse.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            h_min_rel: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// What the observer wants after an accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Finished,
    Stopped,
    /// The step size fell below the minimum; `h` is the last attempted step.
    StepCollapse { h: f64 },
    MaxSteps,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th-order minus embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo(y: &[f64], h: f64, terms: &[(f64, &[f64])], out: &mut [f64]) {
    for i in 0..y.len() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] = y[i] + h * s;
    }
}

fn err_norm(y: &[f64], ynew: &[f64], err: &[f64], s: &IntegratorSettings) -> f64 {
    let n = y.len().max(1) as f64;
    let sum: f64 = (0..y.len())
        .map(|i| {
            let sc = s.atol + s.rtol * y[i].abs().max(ynew[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrate from `t0` to `t_end` (either direction). The observer sees the
/// initial state and every accepted state.
pub fn integrate<S, F>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    settings: &IntegratorSettings,
    mut observer: F,
) -> Result<(Outcome, StepStats)>
where
    S: System + ?Sized,
    F: FnMut(f64, &[f64]) -> Control,
{
    let n = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut stats = StepStats::default();
    let mut t = t0;
    let mut y = y0.to_vec();
    sys.project(&mut y);
    if observer(t, &y) == Control::Stop {
        return Ok((Outcome::Stopped, stats));
    }
    if t == t_end || n == 0 {
        return Ok((Outcome::Finished, stats));
    }
    let mut k1 = vec![0.0; n];
    let eval = |t: f64, y: &[f64], dy: &mut [f64], stats: &mut StepStats| -> Result<()> {
        stats.rhs_evals += 1;
        sys.rhs(t, y, dy)?;
        if dy.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteRhs { t });
        }
        Ok(())
    };
    eval(t, &y, &mut k1, &mut stats)?;

    let span = (t_end - t0).abs();
    let mut h = match settings.h_init {
        Some(h) => h.abs(),
        None => {
            let d0 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let d1 = k1.iter().map(|v| v * v).sum::<f64>().sqrt();
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6
            } else {
                0.01 * d0 / d1
            }
        }
    }
    .min(settings.h_max)
    .min(span);

    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut err = vec![0.0; n];

    loop {
        if stats.accepted >= settings.max_steps {
            return Ok((Outcome::MaxSteps, stats));
        }
        let remaining = (t_end - t).abs();
        let mut last = false;
        // absorb roundoff-sized remainders into this step
        if h >= remaining || remaining - h <= 1e-8 * h {
            h = remaining;
            last = true;
        }
        let hmin = settings.h_min_rel * t.abs().max(1.0);
        if h < hmin && !last {
            return Ok((Outcome::StepCollapse { h }, stats));
        }
        let hs = dir * h;
        let trial = (|| -> Result<bool> {
            combo(&y, hs, &[(A21, &k1)], &mut tmp);
            eval(t + C2 * hs, &tmp, &mut k2, &mut stats)?;
            combo(&y, hs, &[(A31, &k1), (A32, &k2)], &mut tmp);
            eval(t + C3 * hs, &tmp, &mut k3, &mut stats)?;
            combo(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut tmp);
            eval(t + C4 * hs, &tmp, &mut k4, &mut stats)?;
            combo(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut tmp);
            eval(t + C5 * hs, &tmp, &mut k5, &mut stats)?;
            combo(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                &mut tmp,
            );
            eval(t + hs, &tmp, &mut k6, &mut stats)?;
            combo(
                &y,
                hs,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                &mut ynew,
            );
            if !sys.admissible(&ynew) {
                return Ok(false);
            }
            eval(t + hs, &ynew, &mut k7, &mut stats)?;
            Ok(true)
        })();
        // intermediate stages may leave the admissible region near a singularity
        let ok = match trial {
            Ok(ok) => ok,
            Err(Error::NonFiniteRhs { .. })
            | Err(Error::NotPositiveDefinite { .. })
            | Err(Error::SingularMatrix { .. }) => false,
            Err(e) => return Err(e),
        };
        if !ok {
            stats.rejected += 1;
            h *= 0.25;
            continue;
        }
        for i in 0..n {
            err[i] = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = err_norm(&y, &ynew, &err, settings);
        if en <= 1.0 {
            stats.accepted += 1;
            t = if last { t_end } else { t + hs };
            std::mem::swap(&mut y, &mut ynew);
            tmp.copy_from_slice(&y);
            sys.project(&mut y);
            // FSAL; re-evaluate if projection moved the state
            std::mem::swap(&mut k1, &mut k7);
            if y != tmp {
                eval(t, &y, &mut k1, &mut stats)?;
            }
            if observer(t, &y) == Control::Stop {
                return Ok((Outcome::Stopped, stats));
            }
            if last {
                return Ok((Outcome::Finished, stats));
            }
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(settings.h_max);
        } else {
            stats.rejected += 1;
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;
    impl System for Decay {
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = -y[0];
            dy[1] = y[0];
            Ok(())
        }
    }

    #[test]
    fn exponential_decay() {
        let (out, stats) =
            integrate(&Decay, 0.0, &[1.0, 0.0], 5.0, &IntegratorSettings::default(), |_, _| Control::Continue)
                .unwrap();
        assert_eq!(out, Outcome::Finished);
        let mut last = vec![];
        integrate(&Decay, 0.0, &[1.0, 0.0], 5.0, &IntegratorSettings::default(), |_, y| {
            last = y.to_vec();
            Control::Continue
        })
        .unwrap();
        assert!((last[0] - (-5.0f64).exp()).abs() < 1e-10);
        assert!((last[0] + last[1] - 1.0).abs() < 1e-10);
        assert!(stats.accepted > 5);
    }

    #[test]
    fn backward_time() {
        let mut last = vec![];
        integrate(&Decay, 0.0, &[1.0, 0.0], -1.0, &IntegratorSettings::default(), |_, y| {
            last = y.to_vec();
            Control::Continue
        })
        .unwrap();
        assert!((last[0] - 1f64.exp()).abs() < 1e-9);
    }

    struct Blowup;
    impl System for Blowup {
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = y[0] * y[0];
            Ok(())
        }
    }

    #[test]
    fn blow_up_collapses_step() {
        let (out, _) = integrate(&Blowup, 0.0, &[1.0], 2.0, &IntegratorSettings::default(), |_, _| {
            Control::Continue
        })
        .unwrap();
        assert!(matches!(out, Outcome::StepCollapse { .. }));
    }
}
