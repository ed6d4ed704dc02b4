//! Invariant affine subspaces of affine iterated function systems.
//!
//! For maps `T_i x = A_i x + v_i` with fixed points `p_i`, an affine subspace
//! `X = W + p_N` is preserved by every map exactly when `A_i W ⊆ W` and
//! `p_i - p_N ∈ W` for all `i`. The smallest such `W` is the closure of the
//! differences `p_i - p_N` under the linear parts, so the minimal invariant
//! subspace is computed directly rather than searched for.
//!
//! Its dimension never exceeds `(N - 1) D`, where `D` is the dimension of
//! the unital algebra generated by the `A_i`, whatever the translations.

use serde::{Deserialize, Serialize};

use crate::algebra::{algebra_orbit_dim, invariant_subspace_closure, unital_algebra_closure};
use crate::dimension::{contraction_certificate, ContractionCertificate};
use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{solve_fixed_point, RealVector, SquareMatrix, SubspaceBasis, Tolerance};
use crate::{par, rng};

/// One affine map `x -> A x + v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(rename = "A")]
    pub linear: SquareMatrix,
    #[serde(rename = "v")]
    pub translation: RealVector,
}

impl AffineMap {
    pub fn new(linear: SquareMatrix, translation: RealVector) -> Result<Self> {
        check_dim(linear.dim(), translation.dim())?;
        Ok(AffineMap { linear, translation })
    }

    pub fn dim(&self) -> usize {
        self.linear.dim()
    }

    pub fn apply(&self, x: &RealVector) -> RealVector {
        &self.linear.mul_vec(x) + &self.translation
    }
}

/// How the contraction hypothesis was established.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Contraction {
    Uncertified,
    Certified(ContractionCertificate),
    /// The caller asserted contraction without a certificate.
    Assumed,
}

/// A tuple of affine maps on `R^d` sharing one dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineIfs {
    dim: usize,
    maps: Vec<AffineMap>,
    contraction: Contraction,
}

impl AffineIfs {
    pub fn new(maps: Vec<AffineMap>) -> Result<Self> {
        let first = maps.first().ok_or_else(|| invalid("an iterated function system needs at least one map"))?;
        let dim = first.dim();
        for m in &maps {
            check_dim(dim, m.dim())?;
        }
        Ok(AffineIfs { dim, maps, contraction: Contraction::Uncertified })
    }

    /// Builds the system and certifies contraction, refusing if no depth up
    /// to `max_depth` certifies it.
    pub fn certified(maps: Vec<AffineMap>, max_depth: usize) -> Result<Self> {
        let mut ifs = Self::new(maps)?;
        if ifs.certify(max_depth).is_none() {
            return Err(Error::Refused(format!(
                "no contraction certificate up to depth {max_depth}: every checked depth has a product of norm >= 1"
            )));
        }
        Ok(ifs)
    }

    /// Attempts to certify contraction; records and returns the certificate.
    pub fn certify(&mut self, max_depth: usize) -> Option<ContractionCertificate> {
        let cert = contraction_certificate(&self.linear_parts(), max_depth)?;
        self.contraction = Contraction::Certified(cert);
        Some(cert)
    }

    /// Proceed without a certificate. Fixed points may then fail to exist.
    pub fn assume_contracting(mut self) -> Self {
        if !matches!(self.contraction, Contraction::Certified(_)) {
            self.contraction = Contraction::Assumed;
        }
        self
    }

    pub fn require_contraction(&self) -> Result<()> {
        match self.contraction {
            Contraction::Uncertified => Err(Error::Refused(
                "contraction is not certified; certify the system or assume contraction explicitly".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn contraction(&self) -> Contraction {
        self.contraction
    }

    pub fn certificate(&self) -> Option<ContractionCertificate> {
        match self.contraction {
            Contraction::Certified(c) => Some(c),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_maps(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn linear_parts(&self) -> Vec<SquareMatrix> {
        self.maps.iter().map(|m| m.linear.clone()).collect()
    }

    pub fn translations(&self) -> Vec<RealVector> {
        self.maps.iter().map(|m| m.translation.clone()).collect()
    }

    /// Same linear parts, new translations; contraction status carries over
    /// since it depends only on the linear parts.
    pub fn with_translations(&self, translations: &[RealVector]) -> Result<Self> {
        if translations.len() != self.maps.len() {
            return Err(invalid(format!("expected {} translations, got {}", self.maps.len(), translations.len())));
        }
        let maps = self
            .maps
            .iter()
            .zip(translations)
            .map(|(m, v)| AffineMap::new(m.linear.clone(), v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(AffineIfs { dim: self.dim, maps, contraction: self.contraction })
    }
}

/// `base + span(directions)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineSubspace {
    pub base: RealVector,
    pub directions: SubspaceBasis,
}

impl AffineSubspace {
    pub fn dim(&self) -> usize {
        self.directions.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn distance(&self, x: &RealVector) -> Result<f64> {
        check_dim(self.ambient_dim(), x.dim())?;
        self.directions.distance(&(x - &self.base))
    }

    pub fn contains(&self, x: &RealVector) -> Result<bool> {
        check_dim(self.ambient_dim(), x.dim())?;
        self.directions.contains(&(x - &self.base))
    }

    /// The base point followed by `base + q` for each basis direction `q`.
    pub fn frame(&self) -> Vec<RealVector> {
        std::iter::once(self.base.clone())
            .chain(self.directions.vectors().iter().map(|q| &self.base + q))
            .collect()
    }

    /// Largest distance from `T_i y` to the subspace over frame points `y`
    /// and maps `T_i`. Zero (up to rounding) iff every map preserves it.
    pub fn invariance_defect(&self, ifs: &AffineIfs) -> Result<f64> {
        check_dim(self.ambient_dim(), ifs.dim())?;
        let mut worst: f64 = 0.0;
        for y in self.frame() {
            for m in ifs.maps() {
                worst = worst.max(self.distance(&m.apply(&y))?);
            }
        }
        Ok(worst)
    }
}

/// Fixed points `p_i = (I - A_i)^{-1} v_i`, in map order.
pub fn fixed_points(ifs: &AffineIfs, tol: &Tolerance) -> Result<Vec<RealVector>> {
    ifs.maps()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            solve_fixed_point(&m.linear, &m.translation, tol).map_err(|e| match e {
                Error::SingularMap { sigma_min, .. } => Error::SingularMap { index: i + 1, sigma_min },
                other => other,
            })
        })
        .collect()
}

/// Smallest affine subspace mapped into itself by every map, based at the
/// fixed point of the last map.
pub fn minimal_invariant_affine_subspace(ifs: &AffineIfs, tol: &Tolerance) -> Result<AffineSubspace> {
    minimal_invariant_affine_subspace_based_at(ifs, ifs.n_maps() - 1, tol)
}

/// As [`minimal_invariant_affine_subspace`], with the fixed point of map
/// `base_index` (zero-based) as base point. The subspace itself does not
/// depend on this choice.
pub fn minimal_invariant_affine_subspace_based_at(
    ifs: &AffineIfs,
    base_index: usize,
    tol: &Tolerance,
) -> Result<AffineSubspace> {
    ifs.require_contraction()?;
    if base_index >= ifs.n_maps() {
        return Err(invalid(format!("base index {base_index} out of range")));
    }
    let directions = fixed_point_closure(ifs, base_index, tol)?;
    let base = fixed_points(ifs, tol)?.swap_remove(base_index);
    Ok(AffineSubspace { base, directions })
}

fn fixed_point_closure(ifs: &AffineIfs, base_index: usize, tol: &Tolerance) -> Result<SubspaceBasis> {
    let points = fixed_points(ifs, tol)?;
    let base = &points[base_index];
    let seeds: Vec<RealVector> = points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != base_index)
        .map(|(_, p)| p - base)
        .collect();
    invariant_subspace_closure(&ifs.linear_parts(), &seeds, tol)
}

/// Checks `1 <= N - 1 <= ell < d`.
pub fn check_ell_hypothesis(n_maps: usize, ell: usize, dim: usize) -> Result<()> {
    if n_maps < 2 {
        return Err(invalid(format!("need 1 <= N - 1, but N = {n_maps}")));
    }
    if ell < n_maps - 1 {
        return Err(invalid(format!("need N - 1 <= ell, but N - 1 = {} and ell = {ell}", n_maps - 1)));
    }
    if ell >= dim {
        return Err(invalid(format!("need ell < d, but ell = {ell} and d = {dim}")));
    }
    Ok(())
}

/// Whether the maps preserve some affine subspace of dimension `<= ell`.
/// Equivalent to the minimal invariant subspace having dimension `<= ell`.
pub fn admits_invariant_subspace(ifs: &AffineIfs, ell: usize, tol: &Tolerance) -> Result<bool> {
    check_ell_hypothesis(ifs.n_maps(), ell, ifs.dim())?;
    ifs.require_contraction()?;
    Ok(fixed_point_closure(ifs, ifs.n_maps() - 1, tol)?.rank() <= ell)
}

/// Outcome of checking `dim X <= (N - 1) D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionBound {
    /// Dimension `D` of the unital algebra generated by the linear parts.
    pub algebra_dim: usize,
    /// `(N - 1) D`.
    pub bound: usize,
    pub subspace_dim: usize,
    pub ambient_dim: usize,
    /// `subspace_dim <= min(bound, d)`. A `false` here is a bug, not a
    /// property of the input.
    pub holds: bool,
}

pub fn dimension_bound(ifs: &AffineIfs, tol: &Tolerance) -> Result<DimensionBound> {
    let x = minimal_invariant_affine_subspace(ifs, tol)?;
    let alg = unital_algebra_closure(&ifs.linear_parts(), tol)?;
    let bound = (ifs.n_maps() - 1) * alg.dim();
    let d = ifs.dim();
    Ok(DimensionBound {
        algebra_dim: alg.dim(),
        bound,
        subspace_dim: x.dim(),
        ambient_dim: d,
        holds: x.dim() <= bound.min(d),
    })
}

pub const GENERIC_CHECK_CAVEAT: &str = "random subspaces attain the generic (maximal) orbit dimension with \
probability one; a non-generic subspace with a smaller orbit is not excluded by sampling";

/// Result of sampling `(N - 1)`-dimensional subspaces and measuring their
/// algebra orbits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericOrbitCheck {
    pub holds_generically: bool,
    pub max_orbit_dim: usize,
    pub samples: usize,
    pub caveat: String,
}

/// For `samples` random `(N - 1)`-dimensional subspaces `U` (sample `i`
/// drawn from stream `seed + i`), computes the smallest algebra-invariant
/// subspace containing `U`. Holds when the largest such dimension is at
/// most `ell`, i.e. every translation tuple admits an invariant subspace of
/// dimension `<= ell`.
pub fn generic_orbit_check(
    gens: &[SquareMatrix],
    ell: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<GenericOrbitCheck> {
    let d = gens.first().map(SquareMatrix::dim).ok_or_else(|| invalid("at least one generator is required"))?;
    check_ell_hypothesis(gens.len(), ell, d)?;
    if samples == 0 {
        return Err(invalid("at least one sample is required"));
    }
    let alg = unital_algebra_closure(gens, tol)?;
    let k = gens.len() - 1;
    let dims = par::try_map_indexed(samples, |i| {
        let mut r = rng::stream(seed, i as u64);
        let u = rng::random_subspace(&mut r, d, k, tol);
        algebra_orbit_dim(&alg, &u)
    })?;
    let max_orbit_dim = dims.into_iter().max().unwrap_or(0);
    Ok(GenericOrbitCheck {
        holds_generically: max_orbit_dim <= ell,
        max_orbit_dim,
        samples,
        caveat: GENERIC_CHECK_CAVEAT.into(),
    })
}

/// Standard-Gaussian translation tuple for sample `index` of a sweep.
pub fn random_translations(seed: u64, index: u64, n_maps: usize, dim: usize) -> Vec<RealVector> {
    let mut r = rng::stream(seed, index);
    (0..n_maps).map(|_| rng::gaussian_vector(&mut r, dim)).collect()
}
