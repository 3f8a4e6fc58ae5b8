//! Numerical core for studying equilibration of closed quantum systems.
//!
//! The crate computes infinite-time moments of quench dynamics exactly, by
//! enumerating resonant tuples of Bohr frequencies, and statistically, by
//! sampling random times. Around that engine it provides the pieces needed to
//! set experiments up (a spin-1/2 chain in a fixed magnetization sector, a
//! dense Jacobi eigensolver, random Hermitian ensembles), the concentration
//! and recurrence-time bounds those moments imply, and a single-particle
//! implementation of free-fermion dynamics.
//!
//! The crate is `no_std` with `alloc`. The default `std` feature enables
//! rayon-backed parallel loops; chunking is fixed in advance so results are
//! bit-identical with and without it. All transcendental functions go through
//! `libm` for the same reason.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

mod error;
pub mod math;
pub mod matrix;

pub mod concentration;
pub mod eigen;
pub mod fermions;
pub mod lattice;
pub mod moments;
pub mod par;
pub mod quench;
pub mod random;
pub mod recurrence;
pub mod sampling;

pub use error::{Error, Result};
pub use matrix::CMatrix;
pub use num_complex::Complex64;
