//! Optimal identification of two unknown pure states.
//!
//! An input qudit is promised to be one of two Haar-random reference states,
//! each of which is handed over as `N` copies. This crate computes the best
//! achievable mean success probability three independent ways and exposes the
//! measurement that attains it:
//!
//! - [`closed_form`]: exact sums over two-row Young diagrams.
//! - [`tensor`] + [`spectral`]: the dense identification operator on
//!   `(C^d)^{⊗(2N+1)}` (or on the doubly-symmetric subspace), its trace norm,
//!   and the projective optimal POVM.
//! - [`montecarlo`]: seeded simulation over Haar-random references.
//!
//! All operators use a subsystem-0-most-significant composite index:
//! `|i_0 i_1 … i_{n-1}⟩ ↦ Σ_k i_k d^{n-1-k}`.

#![forbid(unsafe_code)]

pub mod closed_form;
mod error;
pub mod montecarlo;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};

pub use closed_form::{DiagramTerm, ProbabilityResult, TwoRowDiagram};
pub use montecarlo::{Estimate, Mode, MonteCarlo, Seed};
pub use spectral::{EigenDecomposition, Level, Povm};
pub use tensor::{
    DenseOperator, OperatorBuilder, OperatorSpace, Permutation, ProductState, PureState,
    SymBasis, TensorLayout, DEFAULT_DIM_CAP,
};

/// Complex scalar used for every amplitude and matrix entry.
pub type C64 = nalgebra::Complex<f64>;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
