//! Sampling of sparse self-orthogonal binary matrices.
//!
//! The crate builds check matrices for quantum LDPC codes one row at a time:
//! every new row is a low-weight codeword of the code defined by the rows found
//! so far, located with Lee–Brickell information set decoding. Alongside the
//! sampler it carries the exact expected weight distribution of the
//! constant-row-weight ensemble, which is what tells you whether a given
//! `(n, r, v)` is feasible before you spend time sampling.
//!
//! Module map:
//!
//! - [`gf2`]: bit-packed vectors and matrices over GF(2), echelon forms, kernels.
//! - [`weight`]: expected weight distributions, GV distance, feasibility rules.
//! - [`isd`]: Lee–Brickell codeword search and its cost model.
//! - [`sampler`]: dual-containing, CSS-pair and stabilizer-pair samplers.
//! - [`toolkit`]: column pruning and weight histograms.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the
//! multi-threaded search backend live in the `qldpc` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod binom;
mod error;
pub mod gf2;
pub mod isd;
pub mod sampler;
pub mod toolkit;
pub mod weight;

pub use error::Error;
pub use gf2::{BitMatrix, BitVector, EchelonBasis, Permutation, RrefResult};

/// Deterministic generator used everywhere a seed is accepted.
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Builds the crate's reproducible generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
