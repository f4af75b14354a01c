use liecurve::catalog::{self, load, random_bracket, random_endomorphism, random_hermitian_metric, random_metric};
use liecurve::hermitian::{self, HermitianMetric, HCF};
use liecurve::lie::{
    complexify, gl_action, json, pi_action, pi_action_bracket, realify_holomorphic, Algebra, RealBracket,
};
use liecurve::linalg::{self, CMatrix, RMatrix};
use liecurve::riemannian::{self, m_orthonormal, m_tensor};
use liecurve::solitons::{self, Operator, SolitonKind};
use liecurve::tensor::Tensor3;
use num_complex::Complex64;
use proptest::prelude::*;

fn dot(a: &Tensor3<f64>, b: &Tensor3<f64>) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

fn tnorm(a: &Tensor3<f64>) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &Tensor3<f64>, b: &Tensor3<f64>) -> Tensor3<f64> {
    let v = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x - y).collect();
    Tensor3::from_vec(a.dim(), v)
}

fn complex_algebras() -> Vec<Algebra> {
    liecurve::cli::complex_catalog().unwrap()
}

fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm() / m.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pi_is_a_homomorphism(dim in 2usize..=6, seed in any::<u64>()) {
        let mu = random_bracket(dim, seed);
        let e = random_endomorphism(dim, seed ^ 1);
        let f = random_endomorphism(dim, seed ^ 2);
        let comm = &e * &f - &f * &e;
        let lhs = pi_action(&comm, &mu);
        let ef = pi_action(&e, &pi_action_bracket(&f, &mu));
        let fe = pi_action(&f, &pi_action_bracket(&e, &mu));
        let rhs = sub(&ef, &fe);
        let err = tnorm(&sub(&lhs, &rhs)) / tnorm(&lhs).max(1e-300);
        prop_assert!(err <= 1e-10, "err {err}");
    }

    #[test]
    fn pi_transpose_is_adjoint(dim in 2usize..=6, seed in any::<u64>()) {
        let mu = random_bracket(dim, seed);
        let nu = random_bracket(dim, seed ^ 3);
        let e = random_endomorphism(dim, seed ^ 4);
        let a = dot(&pi_action(&e, &mu), nu.tensor());
        let b = dot(mu.tensor(), &pi_action(&e.transpose(), &nu));
        let scale = tnorm(&pi_action(&e, &mu)) * nu.norm();
        prop_assert!((a - b).abs() <= 1e-12 * scale);
    }

    #[test]
    fn gl_action_differentiates_to_pi(dim in 2usize..=5, seed in any::<u64>()) {
        let mu = random_bracket(dim, seed);
        let e = random_endomorphism(dim, seed ^ 5);
        let h = 1e-5;
        let moved = gl_action(&linalg::expm(&(&e * h)), &mu).unwrap();
        let fd = sub(moved.tensor(), mu.tensor());
        let fd = Tensor3::from_vec(dim, fd.as_slice().iter().map(|x| x / h).collect());
        let pi = pi_action(&e, &mu);
        let err = tnorm(&sub(&fd, &pi)) / tnorm(&pi);
        prop_assert!(err <= 1e-4, "err {err}");
    }

    #[test]
    fn moment_map_identity(dim in 2usize..=6, seed in any::<u64>()) {
        let mu = random_bracket(dim, seed);
        let e = random_endomorphism(dim, seed ^ 6);
        let g0 = catalog::random_real_metric(dim, seed ^ 7);
        prop_assert!(riemannian::moment_map_residual(&mu, &e, &g0).unwrap() <= 1e-10);
    }

    #[test]
    fn moment_map_holds_after_gl_action(dim in 2usize..=5, seed in any::<u64>()) {
        let mu = random_bracket(dim, seed);
        let a = random_endomorphism(dim, seed ^ 8) + RMatrix::identity(dim, dim) * 3.0;
        let moved = gl_action(&a, &mu).unwrap();
        let e = random_endomorphism(dim, seed ^ 9);
        prop_assert!(riemannian::moment_map_residual(&moved, &e, &RMatrix::identity(dim, dim)).unwrap() <= 1e-10);
    }

    #[test]
    fn trace_of_m(dim in 2usize..=6, seed in any::<u64>()) {
        let mu = random_bracket(dim, seed);
        let g = catalog::random_real_metric(dim, seed ^ 10);
        let m = m_tensor(&mu, &g).unwrap();
        let tr = riemannian::metric_trace(&g, &m).unwrap();
        let ns = riemannian::bracket_norm_sq(&mu, &g).unwrap();
        prop_assert!((tr + 0.25 * ns).abs() <= 1e-12 * ns);
    }

    #[test]
    fn m_is_frame_covariant(dim in 2usize..=6, seed in any::<u64>()) {
        let mu = random_bracket(dim, seed);
        let g = catalog::random_real_metric(dim, seed ^ 11);
        let p = random_endomorphism(dim, seed ^ 12) + RMatrix::identity(dim, dim) * 3.0;
        let m = m_tensor(&mu, &g).unwrap();
        let m2 = m_tensor(&mu.in_basis(&p).unwrap(), &(p.transpose() * &g * &p)).unwrap();
        let expect = p.transpose() * m * &p;
        prop_assert!((&m2 - &expect).norm() <= 1e-10 * expect.norm());
    }

    #[test]
    fn complexify_realify_round_trip(idx in 0usize..7, seed in any::<u64>()) {
        let alg = &complex_algebras()[idx];
        let js = alg.complex_structure().unwrap();
        let cb = complexify(&alg.bracket, js).unwrap();
        let back = cb.realify().unwrap();
        let err = tnorm(&sub(back.tensor(), alg.bracket.tensor()));
        prop_assert!(err <= 1e-12 * alg.bracket.norm().max(1.0));
        // holomorphic round trip through a random unitary frame
        let h = random_hermitian_metric(js.complex_dim(), seed);
        let u = hermitian::unitary_frame(&cb, &h).unwrap();
        let n = u.n();
        let hol: Tensor3<Complex64> = Tensor3::from_fn(n, |i, j, k| u.bracket.mu_hol(i, j, k));
        let (real, js2) = realify_holomorphic(&hol);
        let cb2 = complexify(&real, &js2).unwrap();
        let mut e: f64 = 0.0;
        for i in 0..n { for j in 0..n { for k in 0..n {
            e = e.max((cb2.mu_hol(i, j, k) - hol[(i, j, k)]).norm());
        }}}
        prop_assert!(e <= 1e-12 * hol.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max));
    }

    #[test]
    fn json_round_trip(idx in 0usize..7) {
        let alg = &complex_algebras()[idx];
        let text = json::algebra_to_json(alg).unwrap();
        let back = json::parse_algebra(&text).unwrap();
        prop_assert_eq!(back.bracket.tensor().as_slice(), alg.bracket.tensor().as_slice());
        let (j1, j2) = (back.j.unwrap(), alg.j.clone().unwrap());
        prop_assert_eq!(j1.j(), j2.j());
    }

    #[test]
    fn curvature_is_frame_covariant(idx in 0usize..7, seed in any::<u64>()) {
        let alg = &complex_algebras()[idx];
        let js = alg.complex_structure().unwrap();
        let cb = complexify(&alg.bracket, js).unwrap();
        let n = js.complex_dim();
        let h = random_hermitian_metric(n, seed);
        let u1 = hermitian::unitary_frame(&cb, &h).unwrap();
        // second unitary frame: rotate the first by a unitary matrix
        let a = catalog::random_hermitian(n, seed ^ 13);
        let w = (a * Complex64::new(0.0, 1.0)).exp();
        let u2 = hermitian::unitary_frame_with(&cb, &h, &(&u1.frame_change * w)).unwrap();
        for x in [HCF, [0.3, -1.0, 0.7, 2.0]] {
            let r1 = hermitian::curvature_report(&u1, &x);
            let r2 = hermitian::curvature_report(&u2, &x);
            for (a1, a2) in [(&r1.Kx, &r2.Kx), (&r1.S, &r2.S), (&r1.Q3, &r2.Q3)] {
                let k1 = u1.to_reference(a1);
                let k2 = u2.to_reference(a2);
                prop_assert!((&k1 - &k2).norm() <= 1e-10 * k1.norm().max(1e-12));
                prop_assert!(hermitian_defect(a1) <= 1e-12 || a1.norm() < 1e-14);
            }
            prop_assert!((r1.s - r2.s).abs() <= 1e-10 * r1.s.abs().max(1.0));
        }
    }

    #[test]
    fn trace_identities_hold(idx in 0usize..7, seed in any::<u64>()) {
        let alg = &complex_algebras()[idx];
        let js = alg.complex_structure().unwrap();
        let cb = complexify(&alg.bracket, js).unwrap();
        let u = hermitian::unitary_frame(&cb, &random_hermitian_metric(js.complex_dim(), seed)).unwrap();
        prop_assert!(hermitian::trace_identities(&u).max_relative_error() <= 1e-10);
    }

    #[test]
    fn k_is_scale_invariant(idx in 0usize..4, seed in any::<u64>()) {
        let name = ["sl2c", "h3c", "s3lambda:-1", "s3lambda:1"][idx];
        let alg = load(name).unwrap().algebra;
        let js = alg.complex_structure().unwrap();
        let cb = complexify(&alg.bracket, js).unwrap();
        let h = random_hermitian_metric(3, seed);
        let k = hermitian::kx_reference(&cb, &h, &HCF).unwrap();
        for c in [0.1, 2.0, 10.0] {
            let kc = hermitian::kx_reference(&cb, &h.scaled(c).unwrap(), &HCF).unwrap();
            prop_assert!((&kc - &k).norm() <= 1e-10 * k.norm());
        }
    }

    #[test]
    fn complex_group_reduction(idx in 0usize..4, seed in any::<u64>()) {
        let name = ["sl2c", "h3c", "s3lambda:-1", "s3lambda:1"][idx];
        let alg = load(name).unwrap().algebra;
        let cb = complexify(&alg.bracket, alg.complex_structure().unwrap()).unwrap();
        let u = hermitian::unitary_frame(&cb, &random_hermitian_metric(3, seed)).unwrap();
        let k = hermitian::hcf_K(&u);
        let k2 = hermitian::complex_group_K(&u).unwrap();
        prop_assert!((&k - &k2).norm() <= 1e-10 * k.norm());
    }

    #[test]
    fn soliton_homothety(seed in any::<u64>(), c in 0.05f64..20.0) {
        let alg = load("h3c").unwrap().algebra;
        let g = random_metric(&alg, seed).unwrap();
        let a = solitons::solve_algebraic_soliton(&alg, &g, Operator::Hcf).unwrap();
        let b = solitons::solve_algebraic_soliton(&alg, &(&g * c), Operator::Hcf).unwrap();
        prop_assert_eq!(a.kind, b.kind);
        prop_assert!((b.lambda * c - a.lambda).abs() <= 1e-9 * a.lambda.abs());
        prop_assert!((a.recompute_residual().unwrap() - a.residual).abs() <= 1e-12);
    }

    #[test]
    fn random_metrics_are_positive_definite(seed in any::<u64>()) {
        let h = random_hermitian_metric(4, seed);
        prop_assert!(linalg::herm_eig_range(h.matrix()).0 > 0.0);
        let h2 = random_hermitian_metric(4, seed);
        prop_assert_eq!(h.matrix(), h2.matrix());
    }
}

#[test]
fn complex_group_formula_rejects_mixed_brackets() {
    let alg = load("nilpotent_6d_remark_1").unwrap().algebra;
    let cb = complexify(&alg.bracket, alg.complex_structure().unwrap()).unwrap();
    let u = hermitian::unitary_frame(&cb, &HermitianMetric::identity(3)).unwrap();
    assert!(hermitian::complex_group_K(&u).is_err());
}

#[test]
fn thousand_random_metrics_positive_definite() {
    for s in 0..1000 {
        assert!(linalg::herm_eig_range(random_hermitian_metric(3, s).matrix()).0 > 0.0);
    }
}

#[test]
fn expanding_solitons_on_unimodular_groups() {
    for name in ["sl2c", "h3c", "s3lambda:-1"] {
        let alg = load(name).unwrap().algebra;
        let js = alg.complex_structure().unwrap().clone();
        for s in 0..20 {
            let h = if name == "s3lambda:-1" { catalog::s3_orthogonal_metric(s) } else { random_hermitian_metric(3, s).matrix().clone() };
            let g = js.real_metric(&h).unwrap();
            let cert = solitons::solve_algebraic_soliton(&alg, &g, Operator::Hcf).unwrap();
            if cert.kind != SolitonKind::None {
                assert!(cert.lambda < 0.0, "{name} seed {s}: lambda {}", cert.lambda);
            }
        }
    }
    // the non-unimodular exception shrinks
    let alg = load("s3lambda:1").unwrap().algebra;
    let cert = solitons::solve_algebraic_soliton(&alg, &RMatrix::identity(6, 6), Operator::Hcf).unwrap();
    assert_eq!(cert.kind, SolitonKind::Soliton);
    assert!(cert.lambda > 0.0);
}

#[test]
fn soliton_trace_matches_volume_change() {
    use liecurve::flows::{integrate, FlowKind, FlowProblem};
    for (name, seed) in [("h3c", 1u64), ("s3lambda:1", 0)] {
        let alg = load(name).unwrap().algebra;
        let js = alg.complex_structure().unwrap().clone();
        let g = if seed == 0 { RMatrix::identity(6, 6) } else { random_metric(&alg, seed).unwrap() };
        let cert = solitons::solve_algebraic_soliton(&alg, &g, Operator::Hcf).unwrap();
        assert_eq!(cert.kind, SolitonKind::Soliton);
        let n = g.nrows() as f64;
        let predicted = -(n * cert.lambda + 2.0 * cert.D.trace());
        let dt = 1e-4;
        let tr = integrate(&FlowProblem::new(alg.clone(), g.clone(), FlowKind::Hcf, dt)).unwrap();
        let h1 = tr.hermitian_at(tr.samples.len() - 1).unwrap();
        let g1 = js.real_metric(&h1).unwrap();
        let rate = (g1.determinant().ln() - g.determinant().ln()) / dt;
        assert!((rate - predicted).abs() <= 0.05 * predicted.abs(), "{name}: {rate} vs {predicted}");
    }
}

#[test]
fn unimodular_complex_flows_are_immortal() {
    use liecurve::flows::{integrate, FlowKind, FlowProblem, Termination};
    for name in ["sl2c", "h3c", "s3lambda:-1"] {
        let alg = load(name).unwrap().algebra;
        for s in 0..3 {
            let g = random_metric(&alg, 600 + s).unwrap();
            let tr = integrate(&FlowProblem::new(alg.clone(), g, FlowKind::Hcf, 1e3)).unwrap();
            assert_eq!(tr.termination, Termination::ReachedHorizon, "{name} seed {s}");
        }
    }
}

#[test]
fn sl2c_diagonal_flow_approaches_static_class() {
    use liecurve::flows::{integrate, FlowKind, FlowProblem};
    let alg = load("sl2c").unwrap().algebra;
    let h0 = HermitianMetric::diagonal(&[0.5, 2.0, 4.0]).unwrap();
    let mut spread = Vec::new();
    for t in [10.0, 100.0, 1000.0] {
        let p = FlowProblem::with_hermitian(alg.clone(), h0.matrix(), FlowKind::Hcf, t).unwrap();
        let tr = integrate(&p).unwrap();
        let h = tr.hermitian_at(tr.samples.len() - 1).unwrap();
        let d: Vec<f64> = (0..3).map(|i| h[(i, i)].re / (1.0 + t)).collect();
        let max = d.iter().cloned().fold(f64::MIN, f64::max);
        let min = d.iter().cloned().fold(f64::MAX, f64::min);
        spread.push((max - min) / max);
    }
    assert!(spread[0] > spread[1] && spread[1] > spread[2], "{spread:?}");
    assert!(spread[2] < 1e-2, "{spread:?}");
}

#[test]
fn m_of_zero_bracket_vanishes() {
    let m = m_orthonormal(&RealBracket::zero(4));
    assert_eq!(m.norm(), 0.0);
}

#[test]
fn m_solitons_on_h3c_share_normalized_spectrum() {
    let alg = load("h3c").unwrap().algebra;
    let js = alg.complex_structure().unwrap().clone();
    let mut spectra: Vec<Vec<f64>> = Vec::new();
    for s in 0..10 {
        let g = js.real_metric(random_hermitian_metric(3, 900 + s).matrix()).unwrap();
        let cert = solitons::solve_algebraic_soliton(&alg, &g, Operator::M).unwrap();
        assert_eq!(cert.kind, SolitonKind::Soliton, "seed {s}");
        let e = linalg::orthonormal_frame(&g).unwrap();
        let mut ev = linalg::sym_eigenvalues(&m_orthonormal(&alg.bracket.in_basis(&e).unwrap()));
        ev.sort_by(f64::total_cmp);
        let scale = cert.lambda.abs();
        spectra.push(ev.iter().map(|v| v / scale).collect());
    }
    for sp in &spectra[1..] {
        for (a, b) in sp.iter().zip(&spectra[0]) {
            assert!((a - b).abs() < 1e-9, "{sp:?} vs {:?}", spectra[0]);
        }
    }
}
