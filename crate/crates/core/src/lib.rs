//! Certification of positive (semi)definiteness for symmetric matrices by
//! determinant criteria, with feasibility intervals for corner entries,
//! PD/PSD completion of partially observed matrices, chordality analysis of
//! observation patterns, and elementwise constraint systems.
//!
//! The crate is generic over the scalar backend: [`scalar::Exact`] (arbitrary
//! precision rationals, exact sign decisions) and `f64` (scaled tolerance
//! band around zero). Concrete aliases for the common instantiations are
//! exported at the crate root.

pub mod completion;
pub mod constraint;
pub mod criterion;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod quadratic;
pub mod scalar;
pub mod sdp;

pub use scalar::{Exact, Scalar, Sign};

/// Symmetric matrix over exact rationals.
pub type ExactMatrix = matrix::SymMatrix<Exact>;
/// Symmetric matrix over `f64`.
pub type FloatMatrix = matrix::SymMatrix<f64>;
/// Partially observed symmetric matrix over exact rationals.
pub type ExactPartialMatrix = completion::PartialSymMatrix<Exact>;
/// Partially observed symmetric matrix over `f64`.
pub type FloatPartialMatrix = completion::PartialSymMatrix<f64>;
/// Corner feasibility interval over exact rationals.
pub type ExactInterval = quadratic::Interval<Exact>;
/// Corner feasibility interval over `f64`.
pub type FloatInterval = quadratic::Interval<f64>;
