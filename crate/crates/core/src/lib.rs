//! Analysis of affine iterated function systems `T_i x = A_i x + v_i`.
//!
//! The central computation finds the smallest affine subspace preserved by
//! every map. Its dimension is bounded by `(N - 1) D`, where `D` is the
//! dimension of the unital matrix algebra generated by the linear parts, and
//! the bound does not depend on the translations. Around that sit the
//! affinity dimension and spectral-radius brackets, chaos-game sampling with
//! box counting, and constructors for a gallery of classical examples.
//!
//! Parallel sweeps use rayon behind the default `parallel` feature; building
//! with `--no-default-features` runs the same code sequentially with
//! bit-identical results.

pub mod algebra;
pub mod attractor;
pub mod dimension;
mod error;
pub mod gallery;
pub mod invariant;
pub mod linalg;
pub mod par;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{RealVector, SquareMatrix, SubspaceBasis, Tolerance};
