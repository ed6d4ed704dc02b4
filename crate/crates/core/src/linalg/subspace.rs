use serde::Serialize;

use super::matrix::{dot, norm, RealVector};
use super::Tolerance;
use crate::error::{check_dim, invalid, Result};

/// Orthonormal spanning set of a linear subspace of `R^n`.
///
/// Orthonormalisation is modified Gram-Schmidt with one re-orthogonalisation
/// pass. A candidate becomes a new direction iff its residual after
/// projection exceeds `rel * max(1, scale)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<RealVector>,
    tol: f64,
}

impl SubspaceBasis {
    pub fn empty(ambient_dim: usize, tol: &Tolerance) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(invalid("subspace ambient dimension must be positive"));
        }
        Ok(SubspaceBasis { ambient_dim, vectors: Vec::new(), tol: tol.rel })
    }

    /// Whole space `R^n` with the standard basis.
    pub fn full(ambient_dim: usize, tol: &Tolerance) -> Result<Self> {
        let mut b = Self::empty(ambient_dim, tol)?;
        b.vectors = (0..ambient_dim).map(|i| RealVector::basis(ambient_dim, i)).collect();
        Ok(b)
    }

    /// Orthonormal basis for the span of `vectors`. The acceptance threshold
    /// is relative to the largest input norm.
    pub fn span(ambient_dim: usize, vectors: &[RealVector], tol: &Tolerance) -> Result<Self> {
        let mut b = Self::empty(ambient_dim, tol)?;
        for v in vectors {
            check_dim(ambient_dim, v.dim())?;
        }
        let scale = vectors.iter().map(RealVector::norm).fold(0.0, f64::max);
        for v in vectors {
            b.push_raw(v.as_slice(), scale);
        }
        Ok(b)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[RealVector] {
        &self.vectors
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    /// Residual of `w` after orthogonal projection onto the subspace.
    pub(crate) fn residual(&self, w: &[f64]) -> Vec<f64> {
        let mut r = w.to_vec();
        for _ in 0..2 {
            for q in &self.vectors {
                let c = dot(q.as_slice(), &r);
                for (ri, qi) in r.iter_mut().zip(q.as_slice()) {
                    *ri -= c * qi;
                }
            }
        }
        r
    }

    /// Euclidean distance from `w` to the subspace.
    pub fn distance(&self, w: &RealVector) -> Result<f64> {
        check_dim(self.ambient_dim, w.dim())?;
        Ok(norm(&self.residual(w.as_slice())))
    }

    /// Membership test: residual `<= rel * max(1, |w|)`.
    pub fn contains(&self, w: &RealVector) -> Result<bool> {
        check_dim(self.ambient_dim, w.dim())?;
        Ok(self.contains_raw(w.as_slice()))
    }

    pub(crate) fn contains_raw(&self, w: &[f64]) -> bool {
        norm(&self.residual(w)) <= self.tol * norm(w).max(1.0)
    }

    /// Adjoins the direction of `w` if its residual exceeds
    /// `rel * max(1, scale)`. Returns whether the rank grew.
    pub(crate) fn push_raw(&mut self, w: &[f64], scale: f64) -> bool {
        debug_assert_eq!(w.len(), self.ambient_dim);
        if self.is_full() {
            return false;
        }
        let r = self.residual(w);
        let rn = norm(&r);
        if rn <= self.tol * scale.max(1.0) || !rn.is_finite() {
            return false;
        }
        let mut q: Vec<f64> = r.iter().map(|x| x / rn).collect();
        // second pass against cancellation in the residual itself
        let q2 = self.residual(&q);
        let n2 = norm(&q2);
        if n2 > 0.0 {
            q = q2.iter().map(|x| x / n2).collect();
        }
        self.vectors.push(RealVector::from_vec_unchecked(q));
        true
    }

    /// Adjoins `w` using its own norm as the scale (the `contains` rule).
    pub fn push(&mut self, w: &RealVector) -> Result<bool> {
        check_dim(self.ambient_dim, w.dim())?;
        Ok(self.push_raw(w.as_slice(), w.norm()))
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> RealVector {
        RealVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn collinear_and_independent() {
        let tol = Tolerance::default();
        assert_eq!(SubspaceBasis::span(2, &[v(&[1.0, 0.0]), v(&[2.0, 0.0])], &tol).unwrap().rank(), 1);
        assert_eq!(SubspaceBasis::span(2, &[v(&[1.0, 0.0]), v(&[0.0, 1.0])], &tol).unwrap().rank(), 2);
        assert_eq!(SubspaceBasis::span(3, &[], &tol).unwrap().rank(), 0);
    }

    #[test]
    fn contains_axis() {
        let tol = Tolerance::default();
        let b = SubspaceBasis::span(2, &[v(&[1.0, 0.0])], &tol).unwrap();
        assert!(b.contains(&v(&[3.0, 0.0])).unwrap());
        assert!(!b.contains(&v(&[0.0, 1.0])).unwrap());
        assert!(b.contains(&v(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn zero_ambient_rejected() {
        assert!(SubspaceBasis::span(0, &[], &Tolerance::default()).is_err());
    }

    #[test]
    fn small_vectors_against_large_scale_are_noise() {
        let tol = Tolerance::default();
        let b = SubspaceBasis::span(2, &[v(&[1e3, 0.0]), v(&[0.0, 1e-8])], &tol).unwrap();
        assert_eq!(b.rank(), 1);
        let b = SubspaceBasis::span(2, &[v(&[1.0, 0.0]), v(&[0.0, 1e-6])], &tol).unwrap();
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn full_space() {
        let b = SubspaceBasis::full(3, &Tolerance::default()).unwrap();
        assert!(b.is_full());
        assert!(b.contains(&v(&[1.0, -2.0, 3.0])).unwrap());
    }
}
