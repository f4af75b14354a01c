//! Dense rank-3 arrays with a single cubic side length.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

/// Cubic rank-3 array `t[i][j][k]`, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor3<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Tensor3<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::default(); dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { dim, data }
    }
}

impl<T> Tensor3<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.dim && j < self.dim && k < self.dim);
        (i * self.dim + j) * self.dim + k
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Tensor3<U> {
        Tensor3 {
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Index<(usize, usize, usize)> for Tensor3<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &T {
        &self.data[self.offset(i, j, k)]
    }
}

impl<T> IndexMut<(usize, usize, usize)> for Tensor3<T> {
    #[inline]
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut T {
        let o = self.offset(i, j, k);
        &mut self.data[o]
    }
}

impl Tensor3<f64> {
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|x| x * s)
    }

    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim * dim);
        Self { dim, data }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
}

impl Tensor3<Complex64> {
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}
