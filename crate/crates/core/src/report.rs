//! JSON encodings shared by reports: complex numbers as `{"re", "im"}`,
//! matrices as row-major nested arrays.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::linalg::{CMatrix, RMatrix};
use crate::tensor::Tensor3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

pub fn cmatrix_rows(m: &CMatrix) -> Vec<Vec<ComplexJson>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)].into()).collect())
        .collect()
}

pub fn rmatrix_rows(m: &RMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

pub fn ser_cmatrix<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    cmatrix_rows(m).serialize(s)
}

pub fn ser_rmatrix<S: Serializer>(m: &RMatrix, s: S) -> Result<S::Ok, S::Error> {
    rmatrix_rows(m).serialize(s)
}

pub fn ser_opt_rmatrix<S: Serializer>(m: &Option<RMatrix>, s: S) -> Result<S::Ok, S::Error> {
    m.as_ref().map(rmatrix_rows).serialize(s)
}

pub fn ser_cvector<S: Serializer>(v: &DVector<Complex64>, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v.iter() {
        seq.serialize_element(&ComplexJson::from(*z))?;
    }
    seq.end()
}

pub fn ser_rvector<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
    v.as_slice().serialize(s)
}

/// Nested `[i][j][k]` arrays.
pub fn ser_ctensor<S: Serializer>(t: &Tensor3<Complex64>, s: S) -> Result<S::Ok, S::Error> {
    let n = t.dim();
    let nested: Vec<Vec<Vec<ComplexJson>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| t[(i, j, k)].into()).collect())
                .collect()
        })
        .collect();
    nested.serialize(s)
}

pub fn ser_cmatrices<S: Serializer>(ms: &[CMatrix], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<_> = ms.iter().map(cmatrix_rows).collect();
    rows.serialize(s)
}

pub fn ser_rmatrices<S: Serializer>(ms: &[RMatrix], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<_> = ms.iter().map(rmatrix_rows).collect();
    rows.serialize(s)
}
