//! Exact-arithmetic machinery for epsilon-quadratic forms over Z and small
//! finite rings: split quadratic formations and their boundaries, gluing of
//! forms along boundary isomorphisms, linking forms on finite abelian groups,
//! and the decision procedures built on top of them (boundary invariants,
//! orbit computations, cancellation criteria and elementarity certificates).
//!
//! Everything is computed exactly: integer matrices use arbitrary precision,
//! rational values are reduced fractions, and every constructed isomorphism
//! or certificate is re-verified against its defining equations before being
//! returned.

pub mod forms;
pub mod formations;
pub mod linking;
pub mod matrix;
pub mod monoid;
pub mod random;
pub mod ring;
pub mod snf;

pub use matrix::Mat;
pub use ring::Ring;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ring error: {0}")]
    Ring(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("invalid document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
