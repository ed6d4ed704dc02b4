//! Dense small-dimension real linear algebra.
//!
//! Everything here works on matrices of side at most [`MAX_DIM`]. Rank
//! decisions go through a single relative [`Tolerance`] that callers pass
//! explicitly.

mod eigen;
mod matrix;
mod subspace;
mod svd;

pub use eigen::{eigenvalues, spectral_radius};
pub use matrix::{RealVector, SquareMatrix};
pub(crate) use matrix::norm as slice_norm;
pub use subspace::SubspaceBasis;
pub use svd::{singular_values, spectral_norm};

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

/// Relative tolerance used for every numerical rank decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub context: String,
}

impl Tolerance {
    pub const DEFAULT_REL: f64 = 1e-9;

    pub fn new(rel: f64, context: impl Into<String>) -> Result<Self> {
        if !(rel > 0.0 && rel.is_finite()) {
            return Err(invalid(format!("tolerance must be positive and finite, got {rel}")));
        }
        Ok(Tolerance { rel, context: context.into() })
    }

    /// Threshold for a residual measured against a vector of norm `scale`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.rel * scale.max(1.0)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: Self::DEFAULT_REL, context: "default".into() }
    }
}

/// Solves `M x = b` by LU with partial pivoting. Returns `None` when a pivot
/// vanishes exactly.
pub fn lu_solve(m: &SquareMatrix, b: &RealVector) -> Result<Option<RealVector>> {
    let n = m.dim();
    crate::error::check_dim(n, b.dim())?;
    let mut a = m.as_slice().to_vec();
    let mut x = b.as_slice().to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot * n + col] == 0.0 {
            return Ok(None);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            x.swap(pivot, col);
        }
        let p = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            x[row] -= f * x[col];
        }
    }
    for row in (0..n).rev() {
        let mut s = x[row];
        for k in row + 1..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    RealVector::new(x).map(Some)
}

/// Determinant via LU with partial pivoting.
pub fn determinant(m: &SquareMatrix) -> f64 {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
        }
    }
    det
}

/// Fixed point `p = (I - A)^{-1} v` of the affine map `x -> A x + v`.
///
/// Fails with [`Error::SingularMap`] (index 0) when the smallest singular
/// value of `I - A` is not above `tol.rel`.
pub fn solve_fixed_point(a: &SquareMatrix, v: &RealVector, tol: &Tolerance) -> Result<RealVector> {
    crate::error::check_dim(a.dim(), v.dim())?;
    let m = &SquareMatrix::identity(a.dim()) - a;
    let sigma_min = *singular_values(&m)?.last().unwrap();
    if sigma_min <= tol.rel {
        return Err(Error::SingularMap { index: 0, sigma_min });
    }
    let singular = || Error::SingularMap { index: 0, sigma_min };
    let mut p = lu_solve(&m, v)?.ok_or_else(singular)?;
    // one round of iterative refinement
    let r = v - &m.mul_vec(&p);
    if let Some(dp) = lu_solve(&m, &r)? {
        p = &p + &dp;
    }
    Ok(p)
}
