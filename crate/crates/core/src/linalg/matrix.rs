use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::MAX_DIM;
use crate::error::{check_dim, invalid, Result};

/// A real vector with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVector {
    data: Vec<f64>,
}

impl RealVector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(invalid("vector must have positive dimension"));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!("vector entry {i} is not finite")));
        }
        Ok(RealVector { data })
    }

    /// Builds from entries known to be finite (results of finite arithmetic).
    pub(crate) fn from_vec_unchecked(data: Vec<f64>) -> Self {
        debug_assert!(!data.is_empty());
        RealVector { data }
    }

    pub fn zeros(dim: usize) -> Self {
        RealVector { data: vec![0.0; dim] }
    }

    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[axis] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn dot(&self, other: &RealVector) -> f64 {
        dot(&self.data, &other.data)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn scale(&self, c: f64) -> RealVector {
        RealVector { data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = crate::Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        RealVector::new(v)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.data
    }
}

impl Index<usize> for RealVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl Add for &RealVector {
    type Output = RealVector;
    fn add(self, rhs: &RealVector) -> RealVector {
        assert_eq!(self.dim(), rhs.dim());
        RealVector { data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &RealVector {
    type Output = RealVector;
    fn sub(self, rhs: &RealVector) -> RealVector {
        assert_eq!(self.dim(), rhs.dim());
        RealVector { data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    // scaled to avoid overflow on large entries
    let m = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * a.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
}

/// Dense `d x d` real matrix stored row-major, `1 <= d <= 16`.
///
/// Serialises as a list of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid(format!("matrix dimension must be in 1..={MAX_DIM}, got {dim}")));
        }
        if data.len() != dim * dim {
            return Err(invalid(format!(
                "{dim}x{dim} matrix needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!("matrix entry ({}, {}) is not finite", i / dim, i % dim)));
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(invalid(format!("row {i} has length {}, expected {dim}", r.len())));
        }
        Self::new(dim, rows.concat())
    }

    pub(crate) fn from_vec_unchecked(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        SquareMatrix { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        SquareMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let dim = entries.len();
        let mut m = Self::zeros(dim);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * dim + i] = e;
        }
        m
    }

    /// Anticlockwise rotation of the plane by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        SquareMatrix { dim: 2, data: vec![c, -s, s, c] }
    }

    /// Block-diagonal matrix with the given blocks in order.
    pub fn block_diag(blocks: &[&SquareMatrix]) -> Result<Self> {
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid(format!("block-diagonal dimension {dim} out of range")));
        }
        let mut m = Self::zeros(dim);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    m.data[(off + i) * dim + off + j] = b.get(i, j);
                }
            }
            off += b.dim;
        }
        Ok(m)
    }

    /// `k` identical copies of `self` along the diagonal.
    pub fn direct_sum_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("direct-sum power must be at least 1"));
        }
        Self::block_diag(&vec![self; k])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    pub fn scale(&self, c: f64) -> Self {
        SquareMatrix { dim: self.dim, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &RealVector) -> RealVector {
        assert_eq!(self.dim, v.dim());
        RealVector {
            data: self.data.chunks(self.dim).map(|row| dot(row, v.as_slice())).collect(),
        }
    }

    /// `out = self * rhs` without allocating.
    pub fn mul_into(&self, rhs: &SquareMatrix, out: &mut SquareMatrix) {
        let n = self.dim;
        debug_assert!(rhs.dim == n && out.dim == n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out.data[i * n..(i + 1) * n];
            dst.fill(0.0);
            for (k, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let src = &rhs.data[k * n..(k + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
    }

    pub fn matmul(&self, rhs: &SquareMatrix) -> Result<SquareMatrix> {
        check_dim(self.dim, rhs.dim)?;
        let mut out = Self::zeros(self.dim);
        self.mul_into(rhs, &mut out);
        Ok(out)
    }

    /// Product `A_{w_1} ... A_{w_n}` of a word over `mats`.
    pub fn word_product(mats: &[SquareMatrix], word: &[usize]) -> SquareMatrix {
        let d = mats[0].dim;
        let mut acc = Self::identity(d);
        let mut tmp = Self::zeros(d);
        for &i in word {
            acc.mul_into(&mats[i], &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        acc
    }
}

impl TryFrom<Vec<Vec<f64>>> for SquareMatrix {
    type Error = crate::Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SquareMatrix::from_rows(&rows)
    }
}

impl From<SquareMatrix> for Vec<Vec<f64>> {
    fn from(m: SquareMatrix) -> Self {
        m.rows()
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let mut out = SquareMatrix::zeros(self.dim);
        self.mul_into(rhs, &mut out);
        out
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>12.6}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}
