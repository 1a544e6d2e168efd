//! Exact toolkit for Frobenius Gram matrices and point-count bounds of
//! curves over finite fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`finite_field`]: arithmetic in `F_{p^k}` and its extensions;
//! * [`curves`]: explicit curve families, covers, biquadratic diagrams and
//!   brute-force point counts on their smooth projective models;
//! * [`zeta`]: L-polynomials from counts, extrapolation, functional equation,
//!   Riemann hypothesis check and genus inference;
//! * [`gram`]: exact integer Gram matrices of the Frobenius classes (absolute,
//!   relative, square-diagram) with PSD verdicts;
//! * [`bounds`]: the Weil, relative, second-order relative and diagram bounds
//!   as exact integer comparisons, collected into reports;
//! * [`feasibility`]: exhaustive search for the largest `N_1` compatible with
//!   a positive semidefinite Gram matrix;
//! * [`corpus`]: seeded corpus generation and the full verification run.

pub mod bounds;
pub mod corpus;
pub mod curves;
pub mod feasibility;
pub mod finite_field;
pub mod gram;
pub mod poly;
pub mod zeta;

mod error;
mod serde_str;

pub use error::Error;
