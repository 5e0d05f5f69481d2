//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors and matrices pack 64 coordinates per `u64`, row-major. Every
//! operation returns a new value or mutates only a value the caller owns, so
//! all types here are `Send + Sync` and can be shared freely between threads.

mod echelon;
mod matrix;
mod permutation;
mod vector;

pub use echelon::{is_in_span, kernel_basis, rank, rref, EchelonBasis, RrefResult};
pub(crate) use echelon::eliminate;
pub use matrix::BitMatrix;
pub use permutation::Permutation;
pub use vector::BitVector;

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) const fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}
