//! JSON representation of Lie algebras.
//!
//! ```json
//! { "name": "h3", "dim": 3,
//!   "entries": [ {"i":0, "j":1, "k":2, "re":1.0, "im":0.0} ],
//!   "complex_structure": [[...], ...],
//!   "field": "real" }
//! ```
//!
//! Only `i < j` entries are listed. With `"field": "complex"` the entries are
//! holomorphic structure constants `mu(Z_i, Z_j) = sum_k (re + i im) Z_k` of a
//! complex Lie algebra of complex dimension `dim`, and the bracket is realified
//! with its standard complex structure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::bracket::RealBracket;
use crate::lie::complex::{realify_holomorphic, ComplexStructure};
use crate::lie::Algebra;
use crate::linalg::RMatrix;
use crate::tensor::Tensor3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixJson {
    fn to_matrix(&self, n: usize) -> Result<RMatrix> {
        match self {
            MatrixJson::Nested(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse(format!("complex_structure must be {n}x{n}")));
                }
                Ok(RMatrix::from_fn(n, n, |r, c| rows[r][c]))
            }
            MatrixJson::Flat(v) => {
                if v.len() != n * n {
                    return Err(Error::Parse(format!(
                        "complex_structure must have {} entries",
                        n * n
                    )));
                }
                Ok(RMatrix::from_row_slice(n, n, v))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    #[serde(default)]
    pub name: String,
    pub dim: usize,
    pub entries: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_structure: Option<MatrixJson>,
    #[serde(default)]
    pub field: Field,
}

impl AlgebraJson {
    pub fn into_algebra(self) -> Result<Algebra> {
        if self.dim == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        for e in &self.entries {
            if e.i >= e.j {
                return Err(Error::Parse(format!(
                    "entry ({},{},{}) must have i < j",
                    e.i, e.j, e.k
                )));
            }
            if e.j >= self.dim || e.k >= self.dim {
                return Err(Error::Parse(format!(
                    "entry ({},{},{}) out of range for dim {}",
                    e.i, e.j, e.k, self.dim
                )));
            }
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::Parse("non-finite structure constant".into()));
            }
        }
        match self.field {
            Field::Real => {
                if let Some(e) = self.entries.iter().find(|e| e.im != 0.0) {
                    return Err(Error::Parse(format!(
                        "real algebra has imaginary part at ({},{},{})",
                        e.i, e.j, e.k
                    )));
                }
                let list: Vec<_> = self.entries.iter().map(|e| (e.i, e.j, e.k, e.re)).collect();
                let bracket = RealBracket::from_entries(self.dim, &list)?;
                let j = match &self.complex_structure {
                    Some(m) => Some(ComplexStructure::new(m.to_matrix(self.dim)?)?),
                    None => None,
                };
                Ok(Algebra::new(self.name, bracket, j))
            }
            Field::Complex => {
                if self.complex_structure.is_some() {
                    return Err(Error::Parse(
                        "complex algebras carry their own complex structure".into(),
                    ));
                }
                let mut m = Tensor3::zeros(self.dim);
                for e in &self.entries {
                    let z = Complex64::new(e.re, e.im);
                    m[(e.i, e.j, e.k)] += z;
                    m[(e.j, e.i, e.k)] -= z;
                }
                let (bracket, js) = realify_holomorphic(&m);
                Ok(Algebra::new(self.name, bracket, Some(js)))
            }
        }
    }

    /// Real-form JSON of an algebra.
    pub fn from_algebra(a: &Algebra) -> Self {
        let entries = a
            .bracket
            .upper_entries()
            .into_iter()
            .map(|(i, j, k, re)| Entry { i, j, k, re, im: 0.0 })
            .collect();
        let complex_structure = a.j.as_ref().map(|js| {
            MatrixJson::Nested(
                js.j()
                    .row_iter()
                    .map(|r| r.iter().cloned().collect())
                    .collect(),
            )
        });
        Self {
            name: a.name.clone(),
            dim: a.bracket.dim(),
            entries,
            complex_structure,
            field: Field::Real,
        }
    }
}

pub fn parse_algebra(text: &str) -> Result<Algebra> {
    let j: AlgebraJson = serde_json::from_str(text)?;
    j.into_algebra()
}

pub fn algebra_to_json(a: &Algebra) -> Result<String> {
    Ok(serde_json::to_string_pretty(&AlgebraJson::from_algebra(a))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_round_trip() {
        let text = r#"{"name":"heis","dim":3,"entries":[{"i":0,"j":1,"k":2,"re":1.0,"im":0.0}]}"#;
        let a = parse_algebra(text).unwrap();
        assert_eq!(a.bracket.get(1, 0, 2), -1.0);
        let again = parse_algebra(&algebra_to_json(&a).unwrap()).unwrap();
        assert_eq!(again.bracket, a.bracket);
    }

    #[test]
    fn rejects_bad_entries() {
        let lower = r#"{"dim":3,"entries":[{"i":1,"j":0,"k":2,"re":1.0}]}"#;
        assert!(parse_algebra(lower).is_err());
        let imag = r#"{"dim":3,"entries":[{"i":0,"j":1,"k":2,"re":1.0,"im":1.0}]}"#;
        assert!(parse_algebra(imag).is_err());
        let range = r#"{"dim":2,"entries":[{"i":0,"j":1,"k":2,"re":1.0}]}"#;
        assert!(parse_algebra(range).is_err());
    }

    #[test]
    fn flat_and_nested_structures_agree() {
        let flat = r#"{"dim":2,"entries":[],"complex_structure":[0,-1,1,0]}"#;
        let nested = r#"{"dim":2,"entries":[],"complex_structure":[[0,-1],[1,0]]}"#;
        let a = parse_algebra(flat).unwrap();
        let b = parse_algebra(nested).unwrap();
        assert_eq!(a.j.unwrap().j(), b.j.unwrap().j());
    }

    #[test]
    fn complex_field_realifies() {
        let text = r#"{"dim":3,"field":"complex","entries":[{"i":0,"j":1,"k":2,"re":1.0,"im":0.0}]}"#;
        let a = parse_algebra(text).unwrap();
        assert_eq!(a.bracket.dim(), 6);
        assert!(a.j.is_some());
    }
}
