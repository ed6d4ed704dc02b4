use super::matrix::{dot, SquareMatrix};
use crate::error::Result;

const MAX_SWEEPS: usize = 80;

/// Singular values in decreasing order, by one-sided (Hestenes) Jacobi.
///
/// The columns of a working copy are rotated pairwise until mutually
/// orthogonal; their norms are then the singular values. This keeps high
/// relative accuracy for the small singular values.
pub fn singular_values(a: &SquareMatrix) -> Result<Vec<f64>> {
    if let Some(i) = a.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(crate::error::invalid(format!("matrix entry {i} is not finite")));
    }
    let n = a.dim();
    // column-major working copy
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| a.get(i, j)).collect()).collect();
    let eps = f64::EPSILON * n as f64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (up, uq) = (*x, *y);
                    *x = c * up - s * uq;
                    *y = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| super::matrix::norm(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Euclidean operator norm, the largest singular value.
pub fn spectral_norm(a: &SquareMatrix) -> f64 {
    singular_values(a).map(|s| s[0]).unwrap_or(f64::NAN)
}
