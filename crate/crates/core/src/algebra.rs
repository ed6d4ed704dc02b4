//! Closure computations in the matrix algebra `M_d(R)`.
//!
//! Matrices are flattened to vectors of length `d^2` and rank-managed by the
//! same [`SubspaceBasis`] machinery used for vectors, so one tolerance policy
//! covers both. Closures are computed frontier by frontier: only directions
//! discovered in the previous round are multiplied by the generators, which
//! is enough because the algebra is spanned by words in the generators.

use serde::Serialize;

use crate::error::{check_dim, invalid, Result};
use crate::linalg::{RealVector, SquareMatrix, SubspaceBasis, Tolerance};
use crate::par;

/// Orthonormal (Frobenius) basis of the unital algebra generated by a
/// matrix tuple.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraBasis {
    dim_ambient: usize,
    #[serde(skip)]
    span: SubspaceBasis,
    generator_count: usize,
    rounds: usize,
}

impl AlgebraBasis {
    /// Side `d` of the matrices.
    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    /// Vector-space dimension `D` of the algebra.
    pub fn dim(&self) -> usize {
        self.span.rank()
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    /// Multiplication rounds used before the span stabilised.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn elements(&self) -> Vec<SquareMatrix> {
        self.span
            .vectors()
            .iter()
            .map(|v| SquareMatrix::from_vec_unchecked(self.dim_ambient, v.as_slice().to_vec()))
            .collect()
    }

    /// Whether `m` lies in the algebra (relative residual rule).
    pub fn contains(&self, m: &SquareMatrix) -> Result<bool> {
        check_dim(self.dim_ambient, m.dim())?;
        Ok(self.span.contains_raw(m.as_slice()))
    }

    /// Largest Frobenius residual of `G E` and `E G` over basis elements `E`
    /// and the given generators (normalised), measured against the span.
    pub fn closure_defect(&self, gens: &[SquareMatrix]) -> f64 {
        let mut worst: f64 = 0.0;
        for e in self.elements() {
            for g in normalized(gens) {
                for p in [&g * &e, &e * &g] {
                    let r = self.span.residual(p.as_slice());
                    worst = worst.max(crate::linalg::slice_norm(&r));
                }
            }
        }
        worst
    }
}

fn normalized(gens: &[SquareMatrix]) -> Vec<SquareMatrix> {
    gens.iter()
        .filter_map(|g| {
            let n = g.frobenius_norm();
            (n > 0.0).then(|| g.scale(1.0 / n))
        })
        .collect()
}

fn common_dim(gens: &[SquareMatrix]) -> Result<usize> {
    let first = gens.first().ok_or_else(|| invalid("at least one generator is required"))?;
    for g in gens {
        check_dim(first.dim(), g.dim())?;
    }
    Ok(first.dim())
}

/// Smallest subalgebra of `M_d(R)` containing the identity and every
/// generator.
///
/// Seeds with `{I, A_1, ..., A_N}`, then repeatedly multiplies the newest
/// basis directions by each generator on both sides until no new direction
/// appears. Generators are scaled to unit Frobenius norm first (the
/// generated algebra is unchanged), so the tolerance applies to products of
/// unit-size factors.
pub fn unital_algebra_closure(gens: &[SquareMatrix], tol: &Tolerance) -> Result<AlgebraBasis> {
    let d = common_dim(gens)?;
    let gens = normalized(gens);
    let mut span = SubspaceBasis::empty(d * d, tol)?;
    let id = SquareMatrix::identity(d).scale(1.0 / (d as f64).sqrt());
    span.push_raw(id.as_slice(), 1.0);
    for g in &gens {
        span.push_raw(g.as_slice(), 1.0);
    }
    let mut frontier = 0..span.rank();
    let mut rounds = 0;
    while !frontier.is_empty() && !span.is_full() && rounds < d * d {
        rounds += 1;
        let current: Vec<SquareMatrix> = span.vectors()[frontier.clone()]
            .iter()
            .map(|v| SquareMatrix::from_vec_unchecked(d, v.as_slice().to_vec()))
            .collect();
        let ng = gens.len();
        let products = par::map_indexed(current.len() * ng, |idx| {
            let (e, g) = (&current[idx / ng], &gens[idx % ng]);
            (g * e, e * g)
        });
        let before = span.rank();
        for (left, right) in &products {
            for p in [left, right] {
                let n = p.frobenius_norm();
                span.push_raw(p.as_slice(), n);
            }
        }
        frontier = before..span.rank();
    }
    Ok(AlgebraBasis { dim_ambient: d, span, generator_count: gens.len(), rounds })
}

/// Smallest subspace containing every seed and mapped into itself by every
/// matrix in `mats` (a Krylov-style closure under several operators).
pub fn invariant_subspace_closure(
    mats: &[SquareMatrix],
    seeds: &[RealVector],
    tol: &Tolerance,
) -> Result<SubspaceBasis> {
    let d = match (mats.first(), seeds.first()) {
        (Some(m), _) => m.dim(),
        (None, Some(s)) => s.dim(),
        (None, None) => return Err(invalid("need at least one matrix or seed")),
    };
    for m in mats {
        check_dim(d, m.dim())?;
    }
    let mats = normalized(mats);
    let mut basis = SubspaceBasis::span(d, seeds, tol)?;
    let mut frontier = 0..basis.rank();
    let mut rounds = 0;
    while !frontier.is_empty() && !basis.is_full() && rounds <= d {
        rounds += 1;
        let current: Vec<RealVector> = basis.vectors()[frontier.clone()].to_vec();
        let nm = mats.len();
        let images = par::map_indexed(current.len() * nm, |idx| mats[idx % nm].mul_vec(&current[idx / nm]));
        let before = basis.rank();
        for w in &images {
            basis.push_raw(w.as_slice(), w.norm());
        }
        frontier = before..basis.rank();
    }
    Ok(basis)
}

/// `span{E u : E in the algebra, u in U}`, the smallest algebra-invariant
/// subspace containing `U`.
pub fn algebra_orbit(alg: &AlgebraBasis, u: &SubspaceBasis) -> Result<SubspaceBasis> {
    check_dim(alg.dim_ambient(), u.ambient_dim())?;
    let tol = Tolerance { rel: u.tol(), context: "algebra orbit".into() };
    let elements = alg.elements();
    let images: Vec<RealVector> = elements
        .iter()
        .flat_map(|e| u.vectors().iter().map(move |x| e.mul_vec(x)))
        .collect();
    SubspaceBasis::span(alg.dim_ambient(), &images, &tol)
}

/// Dimension of [`algebra_orbit`].
pub fn algebra_orbit_dim(alg: &AlgebraBasis, u: &SubspaceBasis) -> Result<usize> {
    algebra_orbit(alg, u).map(|b| b.rank())
}
