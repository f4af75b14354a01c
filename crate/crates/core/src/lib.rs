//! Left-invariant Hermitian and Riemannian geometry on Lie groups from
//! structure constants: Chern curvature and torsion, the HCF tensor `K` and its
//! `K^x` family, the `M`/Ricci decomposition, metric and bracket flows, and
//! algebraic soliton detection.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod flows;
pub mod hermitian;
pub mod lie;
pub mod linalg;
pub mod report;
pub mod riemannian;
pub mod solitons;
pub mod tensor;
pub mod tol;

pub use error::{Error, Result};
pub use lie::{Algebra, ComplexStructure, RealBracket};
