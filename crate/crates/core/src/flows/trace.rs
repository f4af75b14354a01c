//! CSV and JSON output of flow traces.

use std::fmt::Write as _;

use serde::Serialize;

use super::{FlowTrace, StateLayout};

/// Column names for the state entries: upper-triangular metric entries
/// (`h{i}{j}_re`, `h{i}{j}_im` or `g{i}{j}`) or bracket entries `c{i}{j}{k}`
/// with `i < j`.
pub fn entry_names(layout: StateLayout) -> Vec<String> {
    let mut v = Vec::new();
    match layout {
        StateLayout::Hermitian { n } => {
            for i in 0..n {
                for j in i..n {
                    v.push(format!("h{i}{j}_re"));
                    v.push(format!("h{i}{j}_im"));
                }
            }
        }
        StateLayout::RealSymmetric { n } => {
            for i in 0..n {
                for j in i..n {
                    v.push(format!("g{i}{j}"));
                }
            }
        }
        StateLayout::Bracket { n } => {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in 0..n {
                        v.push(format!("c{i}{j}{k}"));
                    }
                }
            }
        }
    }
    v
}

fn entries(layout: StateLayout, y: &[f64]) -> Vec<f64> {
    let mut v = Vec::new();
    match layout {
        StateLayout::Hermitian { n } => {
            for i in 0..n {
                for j in i..n {
                    v.push(y[i * n + j]);
                    v.push(y[n * n + i * n + j]);
                }
            }
        }
        StateLayout::RealSymmetric { n } => {
            for i in 0..n {
                for j in i..n {
                    v.push(y[i * n + j]);
                }
            }
        }
        StateLayout::Bracket { n } => {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in 0..n {
                        v.push(y[(i * n + j) * n + k]);
                    }
                }
            }
        }
    }
    v
}

/// `t,<entries>,mu_norm_sq,M_norm_sq,F,r_nu,min_eig`, one row per sample.
pub fn to_csv(trace: &FlowTrace) -> String {
    let mut out = String::new();
    out.push('t');
    for name in entry_names(trace.layout) {
        out.push(',');
        out.push_str(&name);
    }
    out.push_str(",mu_norm_sq,M_norm_sq,F,r_nu,min_eig\n");
    for s in &trace.samples {
        let _ = write!(out, "{:.17e}", s.t);
        for v in entries(trace.layout, &s.state) {
            let _ = write!(out, ",{v:.17e}");
        }
        let _ = writeln!(
            out,
            ",{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            s.mu_norm_sq, s.m_norm_sq, s.f, s.r_nu, s.min_eig
        );
    }
    out
}

/// JSON envelope: problem echo, integrator statistics and termination.
#[derive(Serialize)]
pub struct Envelope<'a> {
    pub algebra: &'a str,
    pub kind: &'a super::FlowKind,
    pub t0: f64,
    pub t_end: f64,
    pub settings: &'a super::IntegratorSettings,
    pub stats: &'a super::StepStats,
    pub outcome: &'a super::Outcome,
    pub termination: &'a super::Termination,
    pub samples: usize,
    pub final_t: f64,
}

pub fn envelope(trace: &FlowTrace) -> Envelope<'_> {
    Envelope {
        algebra: &trace.algebra,
        kind: &trace.kind,
        t0: trace.t0,
        t_end: trace.t_end,
        settings: &trace.settings,
        stats: &trace.stats,
        outcome: &trace.outcome,
        termination: &trace.termination,
        samples: trace.samples.len(),
        final_t: trace.last().t,
    }
}

pub fn to_json(trace: &FlowTrace) -> String {
    serde_json::to_string_pretty(&envelope(trace)).expect("trace envelope serializes")
}
