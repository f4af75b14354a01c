use liecurve::catalog::{load, random_metric};
use liecurve::flows::{self, trace, FlowKind, FlowProblem, Termination};
use liecurve::linalg::{self, RMatrix};
use liecurve::riemannian::bracket_norm_sq;

// d/dt mu = -pi(M_mu) mu is d/dt g = -2 M(g) seen through orthonormal frames,
// so the bracket at time s matches the M-flow metric at time 2s.
#[test]
fn bracket_flow_is_m_flow_at_double_time() {
    for name in ["h3c", "sl2c"] {
        let alg = load(name).unwrap().algebra;
        let g0 = random_metric(&alg, 2).unwrap();
        let s = 0.05;
        let bf = flows::integrate(&FlowProblem::new(alg.clone(), g0.clone(), FlowKind::BracketFlow, s)).unwrap();
        let mf = flows::integrate(&FlowProblem::new(alg.clone(), g0, FlowKind::MFlow, 2.0 * s)).unwrap();
        let mu = bf.final_bracket().unwrap();
        let g = mf.real_metric_at(mf.samples.len() - 1).unwrap();
        // compare isometry invariants: |mu|^2 and the spectrum of M
        let a = mu.norm_sq();
        let b = bracket_norm_sq(&alg.bracket, &g).unwrap();
        assert!((a - b).abs() <= 1e-7 * b, "{name}: {a} vs {b}");
        let mut s1 = linalg::sym_eigenvalues(&liecurve::riemannian::m_orthonormal(&mu));
        let e = linalg::orthonormal_frame(&g).unwrap();
        let mut s2 = linalg::sym_eigenvalues(&liecurve::riemannian::m_orthonormal(&alg.bracket.in_basis(&e).unwrap()));
        s1.sort_by(f64::total_cmp);
        s2.sort_by(f64::total_cmp);
        for (x, y) in s1.iter().zip(&s2) {
            assert!((x - y).abs() <= 1e-7 * b, "{name}: {s1:?} vs {s2:?}");
        }
    }
}

#[test]
fn normalized_flow_keeps_unit_norm() {
    let alg = load("sl2c").unwrap().algebra;
    let g = random_metric(&alg, 5).unwrap();
    let tr = flows::integrate(&FlowProblem::new(alg, g, FlowKind::NormalizedBracketFlow, 20.0)).unwrap();
    for s in &tr.samples {
        assert!((s.mu_norm_sq - 1.0).abs() < 1e-12);
        assert!((s.r_nu - 4.0 * s.f).abs() < 1e-15);
    }
    assert!(tr.max_f_increase() <= 1e-12);
}

#[test]
fn m_flow_on_h3c_is_immortal() {
    let alg = load("h3c").unwrap().algebra;
    let tr = flows::integrate(&FlowProblem::new(alg, RMatrix::identity(6, 6), FlowKind::MFlow, 100.0)).unwrap();
    assert_eq!(tr.termination, Termination::ReachedHorizon);
}

#[test]
fn csv_columns_match_layout() {
    let alg = load("h3c").unwrap().algebra;
    let norm = bracket_norm_sq(&alg.bracket, &RMatrix::identity(6, 6)).unwrap();
    assert!(norm > 0.0);
    let tr = flows::integrate(&FlowProblem::new(alg, RMatrix::identity(6, 6), FlowKind::BracketFlow, 1.0)).unwrap();
    let csv = trace::to_csv(&tr);
    let mut lines = csv.lines();
    let cols = lines.next().unwrap().split(',').count();
    assert_eq!(cols, 1 + 15 * 6 + 5);
    for l in lines {
        assert_eq!(l.split(',').count(), cols);
    }
    assert!(trace::to_json(&tr).contains("\"kind\""));
}

#[test]
fn backward_flow_reaches_negative_horizon() {
    let alg = load("sl2c").unwrap().algebra;
    let mut p = FlowProblem::new(alg, RMatrix::identity(6, 6), FlowKind::Hcf, -1.0);
    p.t0 = 0.0;
    let tr = flows::integrate(&p).unwrap();
    assert_eq!(tr.last().t, -1.0);
    let h = tr.hermitian_at(tr.samples.len() - 1).unwrap();
    assert!((h[(0, 0)].re - 0.5).abs() < 1e-9);
}
