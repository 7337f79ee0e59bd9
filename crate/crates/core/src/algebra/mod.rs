//! Algebraic substrate: GF(2) vectors and matrices, GF(2^l) field
//! elements and polynomials, and the Toeplitz two-universal hash family.
//!
//! Bit order convention for the whole crate: index 0 is the least
//! significant bit of stored words, and all serialization is
//! little-endian bit order.

mod bits;
mod f2k;
mod toeplitz;

pub use bits::{BitMatrix, BitVector};
pub use f2k::{F2kElement, Field, Polynomial};
pub use toeplitz::ToeplitzHash;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    /// Dimension mismatch in a vector/matrix/hash operation.
    #[error("shape: {0}")]
    Shape(String),
    /// Operands from different fields.
    #[error("field: operands belong to different fields")]
    FieldMismatch,
    /// No valid field of the requested degree.
    #[error("field: {0}")]
    BadField(String),
}
