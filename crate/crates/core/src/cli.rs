//! Command-line driver: flows, soliton certificates, static scans, identity
//! suites and the catalog.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog;
use crate::error::{Error, Result};
use crate::flows::{self, FlowKind, FlowProblem, Termination};
use crate::hermitian::{self, HermitianMetric, HCF, MODIFIED_HCF, PCF};
use crate::lie::{complexify, Algebra};
use crate::linalg::{CMatrix, RMatrix};
use crate::riemannian;
use crate::solitons::{self, Operator};
use crate::tol;

#[derive(Parser, Debug)]
#[command(name = "liecurve", version, about = "Curvature, flows and solitons of left-invariant metrics on Lie groups")]
pub struct Cli {
    /// Worker threads for sample-parallel commands.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Override the algebraic tolerance (also read from LIECURVE_TOL).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate a metric or bracket flow and write its trace.
    Flow(FlowArgs),
    /// Certify an algebraic soliton for one metric.
    Soliton(SolitonArgs),
    /// Sample metrics and count those with K^x = lambda g.
    StaticScan(ScanArgs),
    /// Run an identity suite; exits 1 on any violation.
    Verify(VerifyArgs),
    /// List catalog entries or show the facts of one entry.
    Catalog { name: Option<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Hcf,
    Pcf,
    ModifiedHcf,
    Kx,
    M,
    Ric11,
    Bracket,
    NormalizedBracket,
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    /// Catalog name or path to an algebra JSON file.
    #[arg(long)]
    pub algebra: String,
    /// `id`, `diag:a,b,...` or `seed:<n>`.
    #[arg(long, default_value = "id")]
    pub metric: String,
    #[arg(long, value_enum, default_value = "hcf")]
    pub kind: KindArg,
    /// Coefficients `x1,x2,x3,x4` for `--kind kx`.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    /// Trace CSV path; the JSON envelope goes next to it with extension `.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Explicit path for the JSON envelope.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub h_max: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SolitonArgs {
    #[arg(long)]
    pub algebra: String,
    #[arg(long, default_value = "id")]
    pub metric: String,
    /// Operator: hcf, pcf, modified-hcf, kx or m.
    #[arg(long, value_enum, default_value = "hcf")]
    pub operator: KindArg,
    #[arg(long)]
    pub x: Option<String>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub algebra: String,
    /// Coefficients `x1,x2,x3,x4`; overrides `--preset`.
    #[arg(long)]
    pub x: Option<String>,
    /// hcf, pcf or modified-hcf.
    #[arg(long, value_enum, default_value = "hcf")]
    pub preset: KindArg,
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scan CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run even when x lies outside the range covered by the non-existence result.
    #[arg(long)]
    pub force: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    MomentMap,
    TraceIdentities,
    Ric11EqualsK,
    NormLaw,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Dimension range `a..b` (inclusive) for the moment-map suite.
    #[arg(long, default_value = "2..6")]
    pub dims: String,
    #[arg(long, default_value_t = 100)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Horizon for the norm-law suite.
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
}

/// Outcome of an identity suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub failures: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    fn from_errors(suite: &str, errors: &[f64], tolerance: f64) -> Self {
        Self {
            suite: suite.to_string(),
            cases: errors.len(),
            max_error: errors.iter().copied().fold(0.0, f64::max),
            tolerance,
            failures: errors.iter().filter(|e| !(**e <= tolerance)).count(),
        }
    }
}

pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{p}` in {what}")))
        })
        .collect()
}

pub fn parse_x(s: &str) -> Result<[f64; 4]> {
    let v = parse_list(s, "x")?;
    <[f64; 4]>::try_from(v.as_slice()).map_err(|_| Error::Parse(format!("x needs 4 entries, got {}", v.len())))
}

/// `a..b` with both ends included.
pub fn parse_dims(s: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let bad = || Error::Parse(format!("bad dimension range `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a < 1 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

/// Metric from the mini-language `id | diag:a,b,... | seed:<n>`.
///
/// For algebras with a complex structure a diagonal of length `n` (the
/// complex dimension) is read as the Hermitian matrix `g(Z_a, Zbar_b)`; a
/// diagonal of the real dimension is read as the real Gram matrix.
pub fn parse_metric(alg: &Algebra, spec: &str) -> Result<RMatrix> {
    let dim = alg.real_dim();
    let spec = spec.trim();
    if spec == "id" || spec == "identity" {
        return Ok(RMatrix::identity(dim, dim));
    }
    if let Some(rest) = spec.strip_prefix("diag:") {
        let d = parse_list(rest, "diag")?;
        if d.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Parse("diagonal entries must be positive".into()));
        }
        if let Some(js) = &alg.j {
            if d.len() == js.complex_dim() && d.len() != dim {
                let h = HermitianMetric::diagonal(&d)?;
                return js.real_metric(h.matrix());
            }
        }
        if d.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: d.len() });
        }
        let g = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
        if let Some(js) = &alg.j {
            let scale = g.amax();
            if js.hermitian_residual(&g) > 1e-12 * scale {
                return Err(Error::NotHermitian { residual: js.hermitian_residual(&g) });
            }
        }
        return Ok(g);
    }
    if let Some(rest) = spec.strip_prefix("seed:") {
        let seed: u64 = rest
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad seed `{rest}`")))?;
        return catalog::random_metric(alg, seed);
    }
    Err(Error::Parse(format!("unknown metric spec `{spec}`")))
}

fn x_of(kind: KindArg, x: Option<&str>) -> Result<Option<[f64; 4]>> {
    if let Some(s) = x {
        return parse_x(s).map(Some);
    }
    Ok(match kind {
        KindArg::Hcf => Some(HCF),
        KindArg::Pcf => Some(PCF),
        KindArg::ModifiedHcf => Some(MODIFIED_HCF),
        KindArg::Kx => return Err(Error::Parse("--x is required with kx".into())),
        _ => None,
    })
}

pub fn flow_kind(kind: KindArg, x: Option<&str>) -> Result<FlowKind> {
    Ok(match kind {
        KindArg::Hcf if x.is_none() => FlowKind::Hcf,
        KindArg::Hcf | KindArg::Pcf | KindArg::ModifiedHcf | KindArg::Kx => {
            FlowKind::Kx(x_of(kind, x)?.expect("x present for K^x kinds"))
        }
        KindArg::M => FlowKind::MFlow,
        KindArg::Ric11 => FlowKind::Ric11Flow,
        KindArg::Bracket => FlowKind::BracketFlow,
        KindArg::NormalizedBracket => FlowKind::NormalizedBracketFlow,
    })
}

pub fn operator(kind: KindArg, x: Option<&str>) -> Result<Operator> {
    Ok(match kind {
        KindArg::Hcf if x.is_none() => Operator::Hcf,
        KindArg::Hcf | KindArg::Pcf | KindArg::ModifiedHcf | KindArg::Kx => {
            Operator::Kx(x_of(kind, x)?.expect("x present for K^x kinds"))
        }
        KindArg::M => Operator::M,
        other => return Err(Error::Parse(format!("{other:?} is not a soliton operator"))),
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn cmd_flow(a: &FlowArgs, out: &mut dyn Write) -> Result<i32> {
    let alg = catalog::resolve(&a.algebra)?;
    let g = parse_metric(&alg, &a.metric)?;
    let kind = flow_kind(a.kind, a.x.as_deref())?;
    if !(a.t_max.is_finite()) {
        return Err(Error::Parse("--t-max must be finite".into()));
    }
    let mut p = FlowProblem::new(alg, g, kind, a.t_max);
    if let Some(v) = a.rtol {
        p.settings.rtol = v;
    }
    if let Some(v) = a.atol {
        p.settings.atol = v;
    }
    if let Some(v) = a.h_max {
        p.settings.h_max = v;
    }
    let trace = flows::integrate(&p)?;
    let json = flows::trace::to_json(&trace);
    if let Some(path) = &a.out {
        write_file(path, &flows::trace::to_csv(&trace))?;
    }
    let json_path = a.json.clone().or_else(|| a.out.as_ref().map(|p| p.with_extension("json")));
    match json_path {
        Some(path) => write_file(&path, &json)?,
        None => writeln!(out, "{json}")?,
    }
    Ok(match trace.termination {
        Termination::ReachedHorizon | Termination::Converged { .. } => 0,
        Termination::Singularity { t_est, t_err, .. } => {
            eprintln!("singularity: T_est = {t_est} +- {t_err}");
            2
        }
        Termination::StepLimit { last_t } => {
            eprintln!("error: step limit reached at t = {last_t}");
            1
        }
    })
}

fn cmd_soliton(a: &SolitonArgs, out: &mut dyn Write) -> Result<i32> {
    let alg = catalog::resolve(&a.algebra)?;
    let g = parse_metric(&alg, &a.metric)?;
    let op = operator(a.operator, a.x.as_deref())?;
    let cert = solitons::solve_algebraic_soliton(&alg, &g, op)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&cert)?)?;
    Ok(0)
}

fn cmd_scan(a: &ScanArgs, out: &mut dyn Write) -> Result<i32> {
    let alg = catalog::resolve(&a.algebra)?;
    let x = match &a.x {
        Some(s) => parse_x(s)?,
        None => x_of(a.preset, None)?.ok_or_else(|| Error::Parse("preset must be a K^x operator".into()))?,
    };
    let n = alg.complex_structure()?.complex_dim();
    let rep = solitons::kx_static_scan(
        &alg,
        x,
        a.seed..a.seed + a.samples,
        |s| catalog::random_hermitian(n, s),
        a.force,
    )?;
    if let Some(path) = &a.out {
        write_file(path, &rep.to_csv())?;
    }
    if !rep.hypothesis_ok {
        eprintln!("warning: x outside the range covered by the non-existence result");
    }
    writeln!(out, "hits={}/{}", rep.hits, rep.samples)?;
    Ok(0)
}

/// `|<pi(E) mu, mu> - 4 <M, E>|` relative to `|M| |E|` over random brackets,
/// endomorphisms and background metrics.
pub fn suite_moment_map(dims: std::ops::RangeInclusive<usize>, samples: u64, seed: u64) -> Result<SuiteReport> {
    let cases: Vec<(usize, u64)> = dims.flat_map(|d| (0..samples).map(move |s| (d, s))).collect();
    let errors: Result<Vec<f64>> = cases
        .par_iter()
        .map(|&(d, s)| {
            let k = seed.wrapping_mul(1_000_003).wrapping_add(s * 7919 + d as u64);
            let b = catalog::random_bracket(d, k);
            let e = catalog::random_endomorphism(d, k ^ 0x5eed);
            let g0 = catalog::random_real_metric(d, k ^ 0xba5e);
            riemannian::moment_map_residual(&b, &e, &g0)
        })
        .collect();
    Ok(SuiteReport::from_errors("moment-map", &errors?, 1e-10))
}

/// Algebras with complex structures used by the Chern-side suites.
pub fn complex_catalog() -> Result<Vec<Algebra>> {
    [
        "sl2c",
        "h3c",
        "s3lambda:-1",
        "s3lambda:1",
        "nilpotent_6d_remark_1",
        "nilpotent_6d_remark_2",
        "abelian_cs_6d",
    ]
    .iter()
    .map(|n| catalog::load(n).map(|e| e.algebra))
    .collect()
}

/// `q1 = q2 = |T|^2`, `q3 = q4 = |w|^2` over catalog algebras and random metrics.
pub fn suite_trace_identities(samples: u64, seed: u64) -> Result<SuiteReport> {
    let algs = complex_catalog()?;
    let cases: Vec<(usize, u64)> = (0..samples).map(|s| ((s as usize) % algs.len(), seed + s)).collect();
    let errors: Result<Vec<f64>> = cases
        .par_iter()
        .map(|&(i, s)| {
            let alg = &algs[i];
            let js = alg.complex_structure()?;
            let cb = complexify(&alg.bracket, js)?;
            let h = catalog::random_hermitian_metric(js.complex_dim(), s);
            let u = hermitian::unitary_frame(&cb, &h)?;
            Ok(hermitian::trace_identities(&u).max_relative_error())
        })
        .collect();
    Ok(SuiteReport::from_errors("trace-identities", &errors?, 1e-10))
}

/// `|K - Ric^{1,1}| / |K|` on the complex unimodular catalog groups.
pub fn suite_ric11_equals_k(samples: u64, seed: u64) -> Result<SuiteReport> {
    let algs: Vec<Algebra> = ["sl2c", "h3c", "s3lambda:-1"]
        .iter()
        .map(|n| catalog::load(n).map(|e| e.algebra))
        .collect::<Result<_>>()?;
    let cases: Vec<(usize, u64)> = (0..algs.len())
        .flat_map(|i| (0..samples).map(move |s| (i, seed + s)))
        .collect();
    let errors: Result<Vec<f64>> = cases
        .par_iter()
        .map(|&(i, s)| {
            let alg = &algs[i];
            let js = alg.complex_structure()?;
            let h = catalog::random_hermitian_metric(js.complex_dim(), s);
            let (k, r) = k_and_ric11(alg, &h)?;
            Ok((&k - &r).norm() / k.norm().max(f64::MIN_POSITIVE))
        })
        .collect();
    Ok(SuiteReport::from_errors("ric11-equals-K", &errors?, 1e-10))
}

/// HCF tensor and `Ric^{1,1}` in the reference frame.
pub fn k_and_ric11(alg: &Algebra, h: &HermitianMetric) -> Result<(CMatrix, CMatrix)> {
    let js = alg.complex_structure()?;
    let cb = complexify(&alg.bracket, js)?;
    let k = hermitian::kx_reference(&cb, h, &HCF)?;
    let r = riemannian::ric11_hermitian(&alg.bracket, js, h.matrix())?;
    Ok((k, r))
}

/// Finite-difference check of `d/dt |mu|^2 = -8 |M_mu|^2` along bracket flows
/// on sl(2,C) and h3(C), started at random metrics scaled to `|mu| = 1`.
pub fn suite_norm_law(samples: u64, seed: u64, t_max: f64) -> Result<SuiteReport> {
    let algs: Vec<Algebra> = ["sl2c", "h3c"]
        .iter()
        .map(|n| catalog::load(n).map(|e| e.algebra))
        .collect::<Result<_>>()?;
    let cases: Vec<(usize, u64)> = (0..algs.len())
        .flat_map(|i| (0..samples).map(move |s| (i, seed + s)))
        .collect();
    let errors: Result<Vec<Vec<f64>>> = cases
        .par_iter()
        .map(|&(i, s)| {
            let alg = &algs[i];
            let g = catalog::random_metric(alg, s)?;
            let ns = riemannian::bracket_norm_sq(&alg.bracket, &g)?;
            let mut p = FlowProblem::new(alg.clone(), g * ns, FlowKind::BracketFlow, t_max);
            p.settings.h_max = 1e-3;
            Ok(flows::integrate(&p)?.norm_law_errors())
        })
        .collect();
    let all: Vec<f64> = errors?.into_iter().flatten().collect();
    Ok(SuiteReport::from_errors("norm-law", &all, 1e-5))
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let rep = match a.suite {
        Suite::MomentMap => suite_moment_map(parse_dims(&a.dims)?, a.samples, a.seed)?,
        Suite::TraceIdentities => suite_trace_identities(a.samples, a.seed)?,
        Suite::Ric11EqualsK => suite_ric11_equals_k(a.samples, a.seed)?,
        Suite::NormLaw => suite_norm_law(a.samples, a.seed, a.t_max)?,
    };
    writeln!(
        out,
        "{}: cases={} max_error={:.3e} tol={:.0e} {}",
        rep.suite,
        rep.cases,
        rep.max_error,
        rep.tolerance,
        if rep.passed() { "PASS" } else { "FAIL" }
    )?;
    Ok(if rep.passed() { 0 } else { 1 })
}

fn cmd_catalog(name: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    match name {
        None => {
            for n in catalog::list() {
                writeln!(out, "{n}")?;
            }
        }
        Some(n) => {
            let e = catalog::load(n)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&e)?)?;
        }
    }
    Ok(0)
}

fn apply_globals(cli: &Cli) -> Result<()> {
    let tol_value = match cli.tol {
        Some(v) => Some(v),
        None => match std::env::var(tol::TOL_ENV_VAR) {
            Ok(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{} = `{s}` is not a number", tol::TOL_ENV_VAR)))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(v) = tol_value {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Parse(format!("tolerance must be positive, got {v}")));
        }
        tol::set_tau_alg(v);
    }
    if let Some(j) = cli.jobs {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    Ok(())
}

/// Run with the given arguments (including the program name) and return the
/// exit code: 0 success, 2 flow singularity, 1 any error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let res = apply_globals(&cli).and_then(|_| match &cli.command {
        Command::Flow(a) => cmd_flow(a, out),
        Command::Soliton(a) => cmd_soliton(a, out),
        Command::StaticScan(a) => cmd_scan(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Catalog { name } => cmd_catalog(name.as_deref(), out),
    });
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_x() {
        assert_eq!(parse_dims("2..6").unwrap(), 2..=6);
        assert!(parse_dims("6..2").is_err());
        assert_eq!(parse_x("1,0,0,0").unwrap(), [1.0, 0.0, 0.0, 0.0]);
        assert!(parse_x("1,0").is_err());
    }

    #[test]
    fn metric_specs() {
        let alg = catalog::load("sl2c").unwrap().algebra;
        let g = parse_metric(&alg, "diag:1,2,3").unwrap();
        let h = alg.j.as_ref().unwrap().hermitian_metric(&g).unwrap();
        assert!((h[(1, 1)].re - 2.0).abs() < 1e-14);
        assert!(parse_metric(&alg, "diag:1,2").is_err());
        assert!(parse_metric(&alg, "bogus").is_err());
        assert_eq!(parse_metric(&alg, "seed:4").unwrap(), parse_metric(&alg, "seed:4").unwrap());
    }
}
