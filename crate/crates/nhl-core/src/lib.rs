//! Exact linear algebra over Q and F_p for homology of n-ary Leibniz and
//! Filippov algebras given by structure constants.
//!
//! The crate builds chain complexes from an algebra's structure constants,
//! computes homology dimensions and representatives, assembles long exact
//! sequences from short exact sequences of complexes, and runs a filtration
//! spectral sequence, all with exact arithmetic.

pub mod algebra;
pub mod complexes;
pub mod error;
pub mod field;
pub mod induced;
pub mod les;
pub mod linalg;
pub mod report;
pub mod spectral;
pub mod words;

pub use error::Error;
pub use field::{Field, FieldSpec, PrimeField, Rationals};
