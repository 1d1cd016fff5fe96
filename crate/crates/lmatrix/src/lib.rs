//! Exact-arithmetic toolkit for L-matrices: square matrices with zero diagonal
//! whose off-diagonal entries are drawn from a fixed finite set L.
//!
//! The crate provides exact fields (rationals, prime fields, simple number
//! fields), dense exact linear algebra, projective geometry over F_q, integer
//! relation machinery, the Grassmannian low-rank constructions, eigenvalue
//! multiplicity amplification, Hasse-derivative vanishing orders, and
//! brute-force oracles for tiny instances.

pub mod artifact;
pub mod construct;
pub mod error;
pub mod experiment;
pub mod field;
pub mod geometry;
pub mod matrix;
pub mod mpoly;
pub mod parse;
pub mod qpoly;
pub mod relations;
pub mod search;
pub mod snf;
pub mod spectral;
pub mod vanishing;

pub use error::Error;
pub use field::{Element, FieldCtx, FieldKind};
pub use matrix::ExactMatrix;

/// Matrices above this entry count refuse exact rational/number-field
/// elimination; use modular rank bounds instead.
pub const MAX_EXACT_ENTRIES: usize = 4_000_000;

/// Default enumeration budget for the brute-force search oracles.
pub const DEFAULT_ENUM_BUDGET: u128 = 1 << 24;
