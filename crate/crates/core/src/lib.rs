//! Exact computation with one-sided subshifts: finite topological Markov
//! shifts and beta-shifts, the exchangeable and conformal measures they carry,
//! and exhaustive desk-scale verification of their defining identities.

pub mod beta;
pub mod conformal;
pub mod ephemeral;
pub mod error;
pub mod lattice;
pub mod markov;
pub mod relations;
pub mod scalar;
pub mod tms;
pub mod words;

pub use error::{Error, Result};
pub use scalar::ExactScalar;
pub use words::{count_vector, CountVector, Symbol, Word};
