//! Bundled algebras with their complex structures, re-verified facts and
//! seeded random generators.
//!
//! Names: `sl2c`, `h3c`, `s3lambda:<re>[,<im>]`, `abelian:<n>` (complex
//! dimension `n`), `nilpotent_6d_remark_1`, `nilpotent_6d_remark_2`,
//! `abelian_cs_6d`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMetric;
use crate::lie::json::parse_algebra;
use crate::lie::structure;
use crate::lie::{complex_structure_predicates, is_unimodular, killing_form, realify_holomorphic, Algebra, RealBracket};
use crate::linalg::{self, c, CMatrix, RMatrix};
use crate::solitons::CartanDecomposition;
use crate::tensor::Tensor3;

const SL2C: &str = include_str!("../catalog/sl2c.json");
const H3C: &str = include_str!("../catalog/h3c.json");
const REMARK_1: &str = include_str!("../catalog/nilpotent_6d_remark_1.json");
const REMARK_2: &str = include_str!("../catalog/nilpotent_6d_remark_2.json");
const ABELIAN_CS: &str = include_str!("../catalog/abelian_cs_6d.json");

/// Structural facts, recomputed from the bracket.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Facts {
    pub unimodular: bool,
    pub nilpotent: bool,
    pub solvable: bool,
    pub semisimple: bool,
    pub center_dim: usize,
    /// `z ∩ Jz != 0`; `None` without a complex structure.
    pub center_meets_j_center: Option<bool>,
    pub j_integrable: Option<bool>,
    pub j_abelian: Option<bool>,
    pub j_bi_invariant: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(skip)]
    pub algebra: Algebra,
    pub facts: Facts,
    #[serde(skip)]
    pub cartan: Option<CartanDecomposition>,
    pub metric_families: Vec<String>,
}

pub fn compute_facts(alg: &Algebra) -> Result<Facts> {
    let b = &alg.bracket;
    let n = b.dim();
    let kill = killing_form(b);
    let eig = linalg::sym_eigenvalues(&kill);
    let kmax = eig.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let semisimple = kmax > 0.0 && eig.iter().all(|x| x.abs() > 1e-9 * kmax) && n > 0;
    let z = structure::center(b);
    let (meets, integ, abel, bi) = match &alg.j {
        Some(js) => {
            let p = complex_structure_predicates(b, js)?;
            (
                Some(structure::intersection_with_image(&z, js.j()) > 0),
                Some(p.integrable),
                Some(p.abelian),
                Some(p.bi_invariant),
            )
        }
        None => (None, None, None, None),
    };
    Ok(Facts {
        unimodular: is_unimodular(b).0,
        nilpotent: structure::is_nilpotent(b),
        solvable: structure::is_solvable(b),
        semisimple,
        center_dim: z.len(),
        center_meets_j_center: meets,
        j_integrable: integ,
        j_abelian: abel,
        j_bi_invariant: bi,
    })
}

pub fn list() -> Vec<&'static str> {
    vec![
        "sl2c",
        "h3c",
        "s3lambda:<re>[,<im>]",
        "abelian:<n>",
        "nilpotent_6d_remark_1",
        "nilpotent_6d_remark_2",
        "abelian_cs_6d",
    ]
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
}

/// `mu(Z1,Z2) = Z2`, `mu(Z1,Z3) = lambda Z3`.
pub fn s3lambda(lambda: Complex64) -> Algebra {
    let mut m = Tensor3::zeros(3);
    let one = c(1.0, 0.0);
    m[(0, 1, 1)] = one;
    m[(1, 0, 1)] = -one;
    m[(0, 2, 2)] = lambda;
    m[(2, 0, 2)] = -lambda;
    let (b, js) = realify_holomorphic(&m);
    let name = if lambda.im == 0.0 {
        format!("s3lambda:{}", lambda.re)
    } else {
        format!("s3lambda:{},{}", lambda.re, lambda.im)
    };
    Algebra::new(name, b, Some(js))
}

fn expected(name: &str, lambda: Option<Complex64>) -> Facts {
    let f = |u, nil, sol, ss, zd, meets, ab, bi| Facts {
        unimodular: u,
        nilpotent: nil,
        solvable: sol,
        semisimple: ss,
        center_dim: zd,
        center_meets_j_center: Some(meets),
        j_integrable: Some(true),
        j_abelian: Some(ab),
        j_bi_invariant: Some(bi),
    };
    match name {
        "sl2c" => f(true, false, false, true, 0, false, false, true),
        "h3c" => f(true, true, true, false, 2, true, false, true),
        "s3lambda" => {
            let l = lambda.expect("parameter");
            f((l + 1.0).norm() == 0.0, false, true, false, 0, false, false, true)
        }
        "nilpotent_6d_remark_1" | "nilpotent_6d_remark_2" => {
            f(true, true, true, false, 1, false, false, false)
        }
        "abelian_cs_6d" => f(true, true, true, false, 2, true, true, false),
        _ => unreachable!("no expectations for {name}"),
    }
}

fn sl2c_cartan() -> CartanDecomposition {
    // x_a span the compact real form su(2), y_a = J x_a span i su(2)
    let e = |i: usize| DVector::from_fn(6, |r, _| if r == i { 1.0 } else { 0.0 });
    CartanDecomposition::new((0..3).map(e).collect(), (3..6).map(e).collect())
}

/// Load and re-verify a catalog entry.
pub fn load(name: &str) -> Result<CatalogEntry> {
    let name = name.trim();
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let diag = vec!["diagonal".to_string(), "random".to_string()];
    let (alg, expect, cartan, families) = match (base, arg) {
        ("sl2c", None) => {
            let a = parse_algebra(SL2C)?;
            (a, Some(expected("sl2c", None)), Some(sl2c_cartan()), diag)
        }
        ("h3c", None) => (parse_algebra(H3C)?, Some(expected("h3c", None)), None, diag),
        ("s3lambda", Some(a)) => {
            let parts: Vec<&str> = a.split(',').collect();
            let lam = match parts.as_slice() {
                [re] => c(parse_f64(re, "lambda")?, 0.0),
                [re, im] => c(parse_f64(re, "lambda")?, parse_f64(im, "lambda")?),
                _ => return Err(Error::Parse(format!("bad s3lambda parameter `{a}`"))),
            };
            if lam.norm() == 0.0 {
                return Err(Error::Parse("s3lambda needs lambda != 0".into()));
            }
            let mut fam = diag;
            if (lam + 1.0).norm() == 0.0 {
                fam.push("orthogonal_23".into());
                fam.push("generic_23".into());
            }
            (s3lambda(lam), Some(expected("s3lambda", Some(lam))), None, fam)
        }
        ("abelian", Some(a)) => {
            let n: usize = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad dimension `{a}`")))?;
            if n == 0 {
                return Err(Error::Parse("abelian needs n >= 1".into()));
            }
            let alg = Algebra::new(
                format!("abelian:{n}"),
                RealBracket::zero(2 * n),
                Some(crate::lie::ComplexStructure::standard(n)),
            );
            (alg, None, None, diag)
        }
        ("nilpotent_6d_remark_1" | "nil6_remark_1", None) => (
            parse_algebra(REMARK_1)?,
            Some(expected("nilpotent_6d_remark_1", None)),
            None,
            diag,
        ),
        ("nilpotent_6d_remark_2" | "nil6_remark_2", None) => (
            parse_algebra(REMARK_2)?,
            Some(expected("nilpotent_6d_remark_2", None)),
            None,
            diag,
        ),
        ("abelian_cs_6d", None) => (
            parse_algebra(ABELIAN_CS)?,
            Some(expected("abelian_cs_6d", None)),
            None,
            diag,
        ),
        _ => return Err(Error::UnknownEntry(name.to_string())),
    };
    let facts = compute_facts(&alg)?;
    if let Some(exp) = expect {
        if exp != facts {
            return Err(Error::CatalogMismatch {
                name: alg.name.clone(),
                detail: format!("expected {exp:?}, computed {facts:?}"),
            });
        }
    }
    if !crate::lie::is_lie(&alg.bracket) {
        return Err(Error::CatalogMismatch {
            name: alg.name.clone(),
            detail: "Jacobi identity fails".into(),
        });
    }
    if let Some(cd) = &cartan {
        cd.verify(&alg.bracket).map_err(|e| Error::CatalogMismatch {
            name: alg.name.clone(),
            detail: e.to_string(),
        })?;
    }
    Ok(CatalogEntry {
        name: alg.name.clone(),
        algebra: alg,
        facts,
        cartan,
        metric_families: families,
    })
}

/// Load a catalog name, or a JSON file when the argument is an existing path.
pub fn resolve(spec: &str) -> Result<Algebra> {
    let path = std::path::Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return parse_algebra(&text);
    }
    Ok(load(spec)?.algebra)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(r: &mut ChaCha8Rng) -> f64 {
    10f64.powf(r.gen_range(-1.0..=1.0))
}

/// `L diag(d) L^*` with unit lower-triangular `L` (uniform complex entries in
/// the unit square around 0) and `d` log-uniform in `[0.1, 10]`.
pub fn random_hermitian(n: usize, seed: u64) -> CMatrix {
    let mut r = rng(seed);
    let mut l = CMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        }
    }
    let d: Vec<f64> = (0..n).map(|_| log_uniform(&mut r)).collect();
    hermitian_from_ldl(&l, &d)
}

fn hermitian_from_ldl(l: &CMatrix, d: &[f64]) -> CMatrix {
    let n = d.len();
    let dm = CMatrix::from_fn(n, n, |i, j| if i == j { c(d[i], 0.0) } else { c(0.0, 0.0) });
    let h = l * dm * l.adjoint();
    (&h + h.adjoint()) * c(0.5, 0.0)
}

pub fn random_hermitian_metric(n: usize, seed: u64) -> HermitianMetric {
    HermitianMetric::new(random_hermitian(n, seed)).expect("L D L^* is positive definite")
}

/// Real analogue of [`random_hermitian`].
pub fn random_real_metric(n: usize, seed: u64) -> RMatrix {
    let mut r = rng(seed);
    let mut l = RMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = r.gen_range(-1.0..1.0);
        }
    }
    let d = RMatrix::from_diagonal(&DVector::from_fn(n, |_, _| log_uniform(&mut r)));
    let g = &l * d * l.transpose();
    (&g + g.transpose()) * 0.5
}

/// A random real metric for the algebra, `J`-Hermitian when it has a complex
/// structure.
pub fn random_metric(alg: &Algebra, seed: u64) -> Result<RMatrix> {
    match &alg.j {
        Some(js) => js.real_metric(&random_hermitian(js.complex_dim(), seed)),
        None => Ok(random_real_metric(alg.real_dim(), seed)),
    }
}

/// Antisymmetric bracket with upper entries uniform in `[-1, 1]`; Jacobi is not
/// imposed.
pub fn random_bracket(dim: usize, seed: u64) -> RealBracket {
    let mut r = rng(seed);
    let mut t = Tensor3::zeros(dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            for k in 0..dim {
                let v = r.gen_range(-1.0..1.0);
                t[(i, j, k)] = v;
                t[(j, i, k)] = -v;
            }
        }
    }
    RealBracket::new(t).expect("antisymmetric by construction")
}

/// Matrix with entries uniform in `[-1, 1]`.
pub fn random_endomorphism(dim: usize, seed: u64) -> RMatrix {
    let mut r = rng(seed);
    RMatrix::from_fn(dim, dim, |_, _| r.gen_range(-1.0..1.0))
}

/// Random Hermitian metric on `s3lambda:-1` with `g(Z2, Zbar3) = 0`.
pub fn s3_orthogonal_metric(seed: u64) -> CMatrix {
    let mut r = rng(seed);
    let mut l = CMatrix::identity(3, 3);
    l[(1, 0)] = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    l[(2, 0)] = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    let d: Vec<f64> = (0..3).map(|_| log_uniform(&mut r)).collect();
    // h_12 = l10 d0 conj(l20) + d1 conj(l21) = 0
    l[(2, 1)] = -(l[(1, 0)].conj() * d[0] * l[(2, 0)]) / d[1];
    let mut h = hermitian_from_ldl(&l, &d);
    h[(1, 2)] = c(0.0, 0.0);
    h[(2, 1)] = c(0.0, 0.0);
    h
}

/// Random Hermitian metric on `s3lambda:-1` with `|g(Z2, Zbar3)| >= 0.1`.
pub fn s3_generic_metric(seed: u64) -> CMatrix {
    let mut k = 0u64;
    loop {
        let h = random_hermitian(3, seed.wrapping_mul(1_000_003).wrapping_add(k));
        if h[(1, 2)].norm() >= 0.1 {
            return h;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_named_entry_loads() {
        for name in [
            "sl2c",
            "h3c",
            "s3lambda:-1",
            "s3lambda:1",
            "s3lambda:0.5,0.5",
            "abelian:2",
            "nilpotent_6d_remark_1",
            "nilpotent_6d_remark_2",
            "abelian_cs_6d",
        ] {
            load(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(load("e8"), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn seeds_are_deterministic() {
        assert_eq!(random_hermitian(3, 7), random_hermitian(3, 7));
        assert_ne!(random_hermitian(3, 7), random_hermitian(3, 8));
    }

    #[test]
    fn s3_orthogonal_sampler() {
        for s in 0..50 {
            let h = s3_orthogonal_metric(s);
            assert!(HermitianMetric::new(h.clone()).is_ok());
            assert_eq!(h[(1, 2)].norm(), 0.0);
        }
    }
}
