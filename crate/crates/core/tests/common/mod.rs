#![allow(dead_code)]

use ifslab::invariant::{AffineIfs, AffineMap};
use ifslab::linalg::spectral_norm;
use ifslab::rng::{self, SeededRng};
use ifslab::{RealVector, SquareMatrix};
use rand::Rng;

pub fn v(x: &[f64]) -> RealVector {
    RealVector::new(x.to_vec()).unwrap()
}

pub fn m(rows: &[&[f64]]) -> SquareMatrix {
    SquareMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

/// Structure imposed on the linear parts of a random system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Generic,
    BlockDiagonal,
    UpperTriangular,
    Commuting,
    Scalar,
}

pub const FAMILIES: [Family; 5] =
    [Family::Generic, Family::BlockDiagonal, Family::UpperTriangular, Family::Commuting, Family::Scalar];

fn raw_matrix(r: &mut SeededRng, d: usize, family: Family, shared: &SquareMatrix) -> SquareMatrix {
    match family {
        Family::Generic => rng::gaussian_matrix(r, d),
        Family::BlockDiagonal => {
            let k = d / 2;
            let a = rng::gaussian_matrix(r, k.max(1));
            let b = rng::gaussian_matrix(r, d - k.max(1));
            SquareMatrix::block_diag(&[&a, &b]).unwrap()
        }
        Family::UpperTriangular => {
            let g = rng::gaussian_matrix(r, d);
            let mut rows = g.rows();
            for (i, row) in rows.iter_mut().enumerate() {
                for x in row.iter_mut().take(i) {
                    *x = 0.0;
                }
            }
            SquareMatrix::from_rows(&rows).unwrap()
        }
        Family::Commuting => {
            let c: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
            let sq = shared * shared;
            &(&SquareMatrix::scalar(d, c[0]) + &shared.scale(c[1])) + &sq.scale(c[2])
        }
        Family::Scalar => SquareMatrix::scalar(d, 1.0),
    }
}

/// Random system whose linear parts have spectral norms in `[lo, hi]`, so
/// contraction certifies at depth 1.
pub fn random_system(seed: u64, d: usize, n: usize, family: Family, lo: f64, hi: f64) -> AffineIfs {
    let mut r = rng::seeded(seed);
    let shared = rng::gaussian_matrix(&mut r, d);
    let maps = (0..n)
        .map(|_| {
            let mut a = raw_matrix(&mut r, d, family, &shared);
            let mut norm = spectral_norm(&a);
            while norm < 1e-3 {
                a = &a + &SquareMatrix::identity(d);
                norm = spectral_norm(&a);
            }
            let target = r.gen_range(lo..hi);
            let a = a.scale(target / norm);
            AffineMap::new(a, rng::gaussian_vector(&mut r, d)).unwrap()
        })
        .collect();
    AffineIfs::certified(maps, 4).unwrap()
}
