//! Seeded randomness.
//!
//! All sampling uses SplitMix64 (Steele, Lea and Flood, 2014) as provided by
//! `rand_xoshiro`. Independent streams are derived as `seed + index`, so a
//! sweep gives the same per-sample draws whichever thread runs it.

use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

use crate::linalg::{RealVector, SquareMatrix, SubspaceBasis, Tolerance};

pub type SeededRng = SplitMix64;

pub fn seeded(seed: u64) -> SeededRng {
    SplitMix64::seed_from_u64(seed)
}

/// Stream for sample `index` of a sweep started at `seed`.
pub fn stream(seed: u64, index: u64) -> SeededRng {
    seeded(seed.wrapping_add(index))
}

pub fn gaussian_vector(rng: &mut SeededRng, dim: usize) -> RealVector {
    RealVector::from_vec_unchecked((0..dim).map(|_| rng.sample(StandardNormal)).collect())
}

pub fn gaussian_matrix(rng: &mut SeededRng, dim: usize) -> SquareMatrix {
    SquareMatrix::from_vec_unchecked(dim, (0..dim * dim).map(|_| rng.sample(StandardNormal)).collect())
}

pub fn uniform_vector(rng: &mut SeededRng, dim: usize, lo: f64, hi: f64) -> RealVector {
    RealVector::from_vec_unchecked((0..dim).map(|_| rng.gen_range(lo..hi)).collect())
}

/// Uniformly distributed `k`-dimensional subspace of `R^dim`, from
/// orthonormalised standard-Gaussian vectors.
pub fn random_subspace(rng: &mut SeededRng, dim: usize, k: usize, tol: &Tolerance) -> SubspaceBasis {
    let mut basis = SubspaceBasis::empty(dim, tol).expect("dim > 0");
    while basis.rank() < k.min(dim) {
        let g = gaussian_vector(rng, dim);
        basis.push(&g).expect("matching dimension");
    }
    basis
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix via Gram-Schmidt).
pub fn random_orthogonal(rng: &mut SeededRng, dim: usize) -> SquareMatrix {
    let basis = random_subspace(rng, dim, dim, &Tolerance::default());
    let mut data = vec![0.0; dim * dim];
    for (j, q) in basis.vectors().iter().enumerate() {
        for i in 0..dim {
            data[i * dim + j] = q[i];
        }
    }
    SquareMatrix::from_vec_unchecked(dim, data)
}
