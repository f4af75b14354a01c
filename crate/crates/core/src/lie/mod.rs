//! Lie algebras given by structure constants.

pub mod bracket;
pub mod complex;
pub mod derivations;
pub mod json;
pub mod structure;

pub use bracket::{
    bracket_inner_product, gl_action, is_lie, is_unimodular, jacobi_residual, killing_form,
    pi_action, pi_action_bracket, trace_form, RealBracket,
};
pub use complex::{
    complex_structure_predicates, complexify, complexify_in_basis, realify_holomorphic,
    ComplexFrameBracket, ComplexStructure, JPredicates,
};
pub use derivations::{derivation_residual, derivation_space, DerivationSpace};

use serde::{Deserialize, Serialize};

/// A real Lie algebra with an optional complex structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Algebra {
    pub name: String,
    pub bracket: RealBracket,
    pub j: Option<ComplexStructure>,
}

impl Algebra {
    pub fn new(name: impl Into<String>, bracket: RealBracket, j: Option<ComplexStructure>) -> Self {
        Self {
            name: name.into(),
            bracket,
            j,
        }
    }

    pub fn real_dim(&self) -> usize {
        self.bracket.dim()
    }

    pub fn complex_structure(&self) -> crate::error::Result<&ComplexStructure> {
        self.j
            .as_ref()
            .ok_or(crate::error::Error::MissingComplexStructure)
    }
}
