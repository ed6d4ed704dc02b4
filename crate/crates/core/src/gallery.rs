//! Worked examples: constructors that validate their parameters, record the
//! values the theory predicts, and a manifest of named default cases.
//!
//! Exact arithmetic is used where floating point would blur the point of an
//! example: integer matrices for the `B1`, `B2` relations and the ring
//! `Z[beta]` (`beta` the golden ratio) for counting distinct compositions.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::unital_algebra_closure;
use crate::dimension::{
    affinity_dim, affinity_dim_truncated, jsr_bracket, lsr_bracket, max_affordable_depth, DimBracket, Word,
    DEFAULT_ROOT_TOL, DEFAULT_WORD_CAP,
};
use crate::error::{check_dim, invalid, Error, Result};
use crate::invariant::{dimension_bound, minimal_invariant_affine_subspace, AffineIfs, AffineMap, DimensionBound};
use crate::linalg::{eigenvalues, RealVector, SquareMatrix, Tolerance};
use crate::{par, rng};

/// Depth searched for contraction certificates of gallery systems.
const CERT_DEPTH: usize = 12;

/// The golden ratio `(1 + sqrt 5) / 2`, root of `x^2 = x + 1`.
pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// `a + b beta` in `Z[beta]`, `beta^2 = beta + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct GoldenInt {
    pub a: i64,
    pub b: i64,
}

impl GoldenInt {
    pub const ZERO: GoldenInt = GoldenInt { a: 0, b: 0 };
    pub const ONE: GoldenInt = GoldenInt { a: 1, b: 0 };
    pub const BETA: GoldenInt = GoldenInt { a: 0, b: 1 };
    /// `1 / beta = beta - 1`.
    pub const BETA_INV: GoldenInt = GoldenInt { a: -1, b: 1 };

    pub const fn new(a: i64, b: i64) -> Self {
        GoldenInt { a, b }
    }

    /// `beta * (a + b beta) = b + (a + b) beta`.
    pub const fn mul_beta(self) -> Self {
        GoldenInt { a: self.b, b: self.a + self.b }
    }

    pub fn pow(self, n: u32) -> Self {
        (0..n).fold(GoldenInt::ONE, |acc, _| acc * self)
    }

    pub fn to_f64(self) -> f64 {
        self.a as f64 + self.b as f64 * golden_ratio()
    }
}

impl Add for GoldenInt {
    type Output = GoldenInt;
    fn add(self, o: GoldenInt) -> GoldenInt {
        GoldenInt { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for GoldenInt {
    type Output = GoldenInt;
    fn sub(self, o: GoldenInt) -> GoldenInt {
        GoldenInt { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for GoldenInt {
    type Output = GoldenInt;
    fn neg(self) -> GoldenInt {
        GoldenInt { a: -self.a, b: -self.b }
    }
}

impl Mul for GoldenInt {
    type Output = GoldenInt;
    fn mul(self, o: GoldenInt) -> GoldenInt {
        GoldenInt { a: self.a * o.a + self.b * o.b, b: self.a * o.b + self.b * o.a + self.b * o.b }
    }
}

impl fmt::Display for GoldenInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}β", self.a, self.b)
    }
}

/// What a case predicts about the affinity dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AffinityExpectation {
    /// Known value, matched within `tol`.
    Exact { value: f64, tol: f64 },
    /// The truncated-pressure upper bound at `depth` exceeds `threshold`.
    UpperAbove { threshold: f64, depth: usize },
    /// `N * lsr_lower^threshold > 1`, which forces the affinity dimension
    /// strictly above `threshold`.
    CertifiedAbove { threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    /// Dimension `D` of the unital algebra generated by the linear parts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra_dim: Option<usize>,
    /// Upper bound on the dimension of the minimal invariant subspace.
    pub max_subspace_dim: usize,
    /// Exact dimension, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affinity: Option<AffinityExpectation>,
    #[serde(default)]
    pub notes: Vec<String>,
}

/// A named quantity computed while building a case. `pass` is set when the
/// quantity is itself a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub label: String,
    pub value: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl Evidence {
    fn info(label: &str, value: serde_json::Value) -> Self {
        Evidence { label: label.into(), value, pass: None }
    }

    fn check(label: &str, value: serde_json::Value, pass: bool) -> Self {
        Evidence { label: label.into(), value, pass: Some(pass) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalleryCase {
    pub name: String,
    pub ifs: AffineIfs,
    pub expected: Expected,
    pub evidence: Vec<Evidence>,
}

fn vector(x: &[f64]) -> Result<RealVector> {
    RealVector::new(x.to_vec())
}

fn certified_pair(a1: SquareMatrix, a2: SquareMatrix, v1: &RealVector, v2: &RealVector) -> Result<AffineIfs> {
    let maps = vec![AffineMap::new(a1, v1.clone())?, AffineMap::new(a2, v2.clone())?];
    certified(maps)
}

fn certified(maps: Vec<AffineMap>) -> Result<AffineIfs> {
    let mats: Vec<SquareMatrix> = maps.iter().map(|m| m.linear.clone()).collect();
    AffineIfs::certified(maps, CERT_DEPTH).map_err(|_| {
        let depth = max_affordable_depth(mats.len(), CERT_DEPTH, DEFAULT_WORD_CAP).max(1);
        let detail = match jsr_bracket(&mats, depth) {
            Ok(b) => format!("joint spectral radius bracket [{}, {}] at depth {}", b.lower, b.upper, b.depth),
            Err(e) => e.to_string(),
        };
        Error::Refused(format!("system is not certified contracting: {detail}"))
    })
}

/// `lambda I` in the plane applied with translations `v1 != v2`; the
/// attractor is a segment.
pub fn make_simple(lambda: f64, v1: &RealVector, v2: &RealVector) -> Result<GalleryCase> {
    if !(lambda > 0.5 && lambda < 1.0) {
        return Err(invalid(format!("lambda must lie in (1/2, 1), got {lambda}")));
    }
    check_dim(2, v1.dim())?;
    check_dim(2, v2.dim())?;
    if v1 == v2 {
        return Err(invalid("translations must be distinct"));
    }
    let a = SquareMatrix::scalar(2, lambda);
    let ifs = certified_pair(a.clone(), a, v1, v2)?;
    Ok(GalleryCase {
        name: "simple".into(),
        ifs,
        expected: Expected {
            algebra_dim: Some(1),
            max_subspace_dim: 1,
            subspace_dim: Some(1),
            affinity: Some(AffinityExpectation::Exact { value: 2f64.ln() / (1.0 / lambda).ln(), tol: 1e-9 }),
            notes: vec!["affinity dimension log 2 / log(1/lambda) exceeds the attractor dimension 1".into()],
        },
        evidence: vec![],
    })
}

fn block_rotation(theta: f64) -> SquareMatrix {
    SquareMatrix::block_diag(&[&SquareMatrix::rotation(theta), &SquareMatrix::rotation(-theta)])
        .expect("2x2 blocks")
}

/// Maps `2^(-1/2 + epsilon) (R_phi + R_-phi) x + v_i` on `R^4`.
pub fn make_example1(epsilon: f64, phi: f64, psi: f64, v1: &RealVector, v2: &RealVector) -> Result<GalleryCase> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(invalid(format!("epsilon must lie in (0, 1/4), got {epsilon}")));
    }
    if !phi.is_finite() || !psi.is_finite() {
        return Err(invalid("angles must be finite"));
    }
    check_dim(4, v1.dim())?;
    check_dim(4, v2.dim())?;
    let r = 2f64.powf(-0.5 + epsilon);
    let ifs = certified_pair(block_rotation(phi).scale(r), block_rotation(psi).scale(r), v1, v2)?;
    let scalar = phi.sin().abs() < 1e-12 && psi.sin().abs() < 1e-12;
    let algebra_dim = if scalar { 1 } else { 2 };
    Ok(GalleryCase {
        name: "example1".into(),
        ifs,
        expected: Expected {
            algebra_dim: Some(algebra_dim),
            max_subspace_dim: algebra_dim,
            subspace_dim: None,
            affinity: Some(AffinityExpectation::Exact { value: 2.0 / (1.0 - 2.0 * epsilon), tol: 1e-9 }),
            notes: vec!["affinity dimension 2 / (1 - 2 epsilon) lies in (2, 4)".into()],
        },
        evidence: vec![],
    })
}

pub const B1: [[i64; 4]; 4] = [[0, -1, -1, 0], [1, 0, 0, -1], [1, 0, 0, -1], [0, 1, 1, 0]];
pub const B2: [[i64; 4]; 4] = [[1, 0, 0, 1], [0, 1, -1, 0], [0, -1, 1, 0], [1, 0, 0, 1]];

type IntMat = [[i64; 4]; 4];

fn int_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let mut out = [[0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn int_lin(c1: i64, a: &IntMat, c2: i64, b: &IntMat) -> IntMat {
    let mut out = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = c1 * a[i][j] + c2 * b[i][j];
        }
    }
    out
}

const INT_ID: IntMat = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
const INT_ZERO: IntMat = [[0; 4]; 4];

/// The four product relations of `B1`, `B2`, checked in integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    /// `B1 B2 = 0`
    pub b1b2_zero: bool,
    /// `B2 B1 = 0`
    pub b2b1_zero: bool,
    /// `B1^2 = 2 B2 - 4 I`
    pub b1_squared: bool,
    /// `B2^2 = 2 B2`
    pub b2_squared: bool,
}

impl RelationCheck {
    pub fn all(&self) -> bool {
        self.b1b2_zero && self.b2b1_zero && self.b1_squared && self.b2_squared
    }
}

pub fn example2_relations() -> RelationCheck {
    RelationCheck {
        b1b2_zero: int_mul(&B1, &B2) == INT_ZERO,
        b2b1_zero: int_mul(&B2, &B1) == INT_ZERO,
        b1_squared: int_mul(&B1, &B1) == int_lin(2, &B2, -4, &INT_ID),
        b2_squared: int_mul(&B2, &B2) == int_lin(2, &B2, 0, &INT_ZERO),
    }
}

fn to_real(m: &IntMat) -> SquareMatrix {
    SquareMatrix::from_rows(&m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect::<Vec<_>>())
        .expect("4x4 integer matrix")
}

/// `alpha I + beta B1 + gamma B2` as a real matrix.
pub fn example2_matrix(alpha: f64, beta: f64, gamma: f64) -> SquareMatrix {
    &(&SquareMatrix::scalar(4, alpha) + &to_real(&B1).scale(beta)) + &to_real(&B2).scale(gamma)
}

/// Maps `(alpha_i I + beta_i B1 + gamma_i B2) x + v_i` on `R^4`.
pub fn make_example2(
    alpha: (f64, f64),
    beta: (f64, f64),
    gamma: (f64, f64),
    v1: &RealVector,
    v2: &RealVector,
) -> Result<GalleryCase> {
    for x in [alpha.0, alpha.1, beta.0, beta.1, gamma.0, gamma.1] {
        if !x.is_finite() {
            return Err(invalid("coefficients must be finite"));
        }
    }
    check_dim(4, v1.dim())?;
    check_dim(4, v2.dim())?;
    let relations = example2_relations();
    let ifs = certified_pair(
        example2_matrix(alpha.0, beta.0, gamma.0),
        example2_matrix(alpha.1, beta.1, gamma.1),
        v1,
        v2,
    )?;
    // B1 generates B2 through B1^2; B2 alone only adds itself
    let algebra_dim = if beta.0 != 0.0 || beta.1 != 0.0 {
        3
    } else if gamma.0 != 0.0 || gamma.1 != 0.0 {
        2
    } else {
        1
    };
    let threshold = 2f64.powf(-1.0 / 3.0);
    let near_scalar = [beta.0, beta.1, gamma.0, gamma.1].iter().all(|x| x.abs() <= 0.01);
    let affinity = (alpha.0 > threshold && alpha.0 < 1.0 && alpha.1 > threshold && alpha.1 < 1.0 && near_scalar)
        .then_some(AffinityExpectation::UpperAbove { threshold: 3.0, depth: 6 });
    Ok(GalleryCase {
        name: "example2".into(),
        ifs,
        expected: Expected {
            algebra_dim: Some(algebra_dim),
            max_subspace_dim: algebra_dim,
            subspace_dim: None,
            affinity,
            notes: vec!["the truncated pressure bound at depth 6 stays above 3 for small beta, gamma".into()],
        },
        evidence: vec![Evidence::check("relations", json!(relations), relations.all())],
    })
}

/// Measured quantities behind the direct-sum construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectSumHypothesis {
    /// `N^(-1/k)`.
    pub threshold: f64,
    /// Certified lower bound on the lower spectral radius.
    pub lsr_lower: f64,
    pub jsr_upper: f64,
    /// `(N - 1) d^2`.
    pub min_k: usize,
    pub k: usize,
    pub depth: usize,
    /// `N * lsr_lower^k`; above 1 it forces the affinity dimension past `k`.
    pub pressure_witness: f64,
}

impl DirectSumHypothesis {
    pub fn holds(&self) -> bool {
        self.k >= self.min_k && self.threshold < self.lsr_lower && self.jsr_upper < 1.0
    }
}

pub fn direct_sum_hypothesis(mats: &[SquareMatrix], k: usize) -> Result<DirectSumHypothesis> {
    let first = mats.first().ok_or_else(|| invalid("at least one matrix is required"))?;
    let d = first.dim();
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    let n = mats.len();
    let depth = max_affordable_depth(n, CERT_DEPTH, DEFAULT_WORD_CAP).max(1);
    let lsr = lsr_bracket(mats, depth)?;
    let jsr = jsr_bracket(mats, depth)?;
    Ok(DirectSumHypothesis {
        threshold: (n as f64).powf(-1.0 / k as f64),
        lsr_lower: lsr.certified_lower,
        jsr_upper: jsr.upper,
        min_k: (n - 1) * d * d,
        k,
        depth,
        pressure_witness: n as f64 * lsr.certified_lower.powi(k as i32),
    })
}

/// Maps `A_i^(+k) x + v_i` on `R^(kd)`, where `A^(+k)` is the direct sum of
/// `k` copies of `A`.
pub fn make_example3(mats: &[SquareMatrix], k: usize, translations: &[RealVector]) -> Result<GalleryCase> {
    let hyp = direct_sum_hypothesis(mats, k)?;
    if mats.len() < 2 {
        return Err(invalid("the construction needs at least two maps"));
    }
    if translations.len() != mats.len() {
        return Err(invalid(format!("{} matrices but {} translations", mats.len(), translations.len())));
    }
    if !hyp.holds() {
        return Err(Error::Refused(format!(
            "hypothesis fails: need k >= {} (k = {}), N^(-1/k) = {} < lsr lower bound {} and jsr upper bound {} < 1",
            hyp.min_k, hyp.k, hyp.threshold, hyp.lsr_lower, hyp.jsr_upper
        )));
    }
    let d = mats[0].dim();
    let maps = mats
        .iter()
        .zip(translations)
        .map(|(a, v)| {
            check_dim(k * d, v.dim())?;
            AffineMap::new(a.direct_sum_power(k)?, v.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let ifs = certified(maps)?;
    let bound = ((mats.len() - 1) * d * d).min(k * d);
    Ok(GalleryCase {
        name: "example3".into(),
        ifs,
        expected: Expected {
            algebra_dim: None,
            max_subspace_dim: bound,
            subspace_dim: None,
            affinity: Some(AffinityExpectation::CertifiedAbove { threshold: k as f64 }),
            notes: vec!["N * lsr_lower^k > 1 forces affinity dimension above k".into()],
        },
        evidence: vec![Evidence::check("hypothesis", json!(hyp), hyp.holds() && hyp.pressure_witness > 1.0)],
    })
}

/// `make_example3` for 1x1 matrices.
pub fn make_example3_scalars(scalars: &[f64], k: usize, translations: &[RealVector]) -> Result<GalleryCase> {
    let mats: Vec<SquareMatrix> = scalars.iter().map(|&s| SquareMatrix::scalar(1, s)).collect();
    make_example3(&mats, k, translations)
}

/// Ten fixed points in `[-2, 2]^dim` at which compositions are compared.
pub fn probe_points(dim: usize) -> Vec<RealVector> {
    (0..10).map(|m| rng::uniform_vector(&mut rng::stream(0x9e37_79b9, m), dim, -2.0, 2.0)).collect()
}

fn compose(ifs: &AffineIfs, word: &Word, x: &RealVector) -> RealVector {
    word.letters().iter().rev().fold(x.clone(), |y, &i| ifs.maps()[i].apply(&y))
}

/// `max_x |T_j x - T_k x|` over [`probe_points`], where `T_w` is the
/// composition `T_{w_1} ( ... T_{w_n}(x))`.
pub fn composition_discrepancy(ifs: &AffineIfs, j_word: &Word, k_word: &Word) -> Result<f64> {
    if j_word.len() != k_word.len() {
        return Err(invalid(format!("words differ in length: {} vs {}", j_word.len(), k_word.len())));
    }
    for w in [j_word, k_word] {
        if let Some(&l) = w.letters().iter().find(|&&l| l >= ifs.n_maps()) {
            return Err(invalid(format!("letter {} exceeds the number of maps {}", l + 1, ifs.n_maps())));
        }
    }
    Ok(probe_points(ifs.dim())
        .iter()
        .map(|x| (&compose(ifs, j_word, x) - &compose(ifs, k_word, x)).norm())
        .fold(0.0, f64::max))
}

fn homothety_pair(lambda: f64, v1: &RealVector, v2: &RealVector) -> Result<AffineIfs> {
    check_dim(v1.dim(), v2.dim())?;
    let a = SquareMatrix::scalar(v1.dim(), lambda);
    AffineIfs::new(vec![AffineMap::new(a.clone(), v1.clone())?, AffineMap::new(a, v2.clone())?])
}

/// Composition discrepancy for the pair `x -> lambda x + v_i`.
pub fn coincidence_check(lambda: f64, j_word: &Word, k_word: &Word, v1: &RealVector, v2: &RealVector) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    composition_discrepancy(&homothety_pair(lambda, v1, v2)?, j_word, k_word)
}

/// `|sum_r lambda^(r-1) (j_r - k_r)| * |v2 - v1|` with one-based letters in
/// `{1, 2}`.
pub fn coincidence_analytic(lambda: f64, j_word: &Word, k_word: &Word, v1: &RealVector, v2: &RealVector) -> Result<f64> {
    if j_word.len() != k_word.len() {
        return Err(invalid("words differ in length"));
    }
    let mut pow = 1.0;
    let mut sum = 0.0;
    for (&j, &k) in j_word.letters().iter().zip(k_word.letters()) {
        sum += pow * (j as f64 - k as f64);
        pow *= lambda;
    }
    Ok(sum.abs() * (v2 - v1).norm())
}

/// `(sqrt 5 - 1) / 2`, the root of `1 - x - x^2` in `(1/2, 1)`.
pub fn simon_solomyak_lambda() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Homotheties of ratio `(sqrt 5 - 1) / 2` whose compositions along the two
/// words agree.
pub fn make_simon_solomyak(j_word: &Word, k_word: &Word, v1: &RealVector, v2: &RealVector) -> Result<GalleryCase> {
    let lambda = simon_solomyak_lambda();
    let d = v1.dim();
    if d < 2 || lambda.powi(d as i32) * 2.0 >= 1.0 {
        return Err(invalid("need d >= 2 with 2 lambda^d < 1"));
    }
    if v1 == v2 {
        return Err(invalid("translations must be distinct"));
    }
    let mut ifs = homothety_pair(lambda, v1, v2)?;
    ifs.certify(CERT_DEPTH).ok_or_else(|| Error::Refused("homotheties failed to certify".into()))?;
    let discrepancy = composition_discrepancy(&ifs, j_word, k_word)?;
    Ok(GalleryCase {
        name: "simon-solomyak".into(),
        ifs,
        expected: Expected {
            algebra_dim: Some(1),
            max_subspace_dim: 1,
            subspace_dim: Some(1),
            affinity: Some(AffinityExpectation::Exact { value: 2f64.ln() / (1.0 / lambda).ln(), tol: 1e-9 }),
            notes: vec!["composition discrepancy is zero for every translation pair".into()],
        },
        evidence: vec![Evidence::check(
            "composition_discrepancy",
            json!({ "j": j_word.to_string(), "k": k_word.to_string(), "max": discrepancy }),
            discrepancy <= 1e-12,
        )],
    })
}

pub const PU_MAX_DEPTH: usize = 24;

/// Number of distinct values `sum_{r<n} c_r beta^(-r)`, `c_r in {0, 1}`,
/// i.e. of distinct horizontal parts of length-`n` compositions when the
/// horizontal contraction is `1/beta`.
///
/// All `2^n` words are enumerated in exact `Z[beta]` arithmetic after
/// multiplying through by `beta^(n-1)`; prefix subtrees run concurrently and
/// their value sets are merged.
pub fn pu_distinct_count(n: usize) -> Result<u64> {
    if !(1..=PU_MAX_DEPTH).contains(&n) {
        return Err(invalid(format!("n must lie in 1..={PU_MAX_DEPTH}, got {n}")));
    }
    let prefix_len = n.min(6);
    let suffix_len = n - prefix_len;
    let parts = par::map_indexed(1 << prefix_len, |p| {
        let mut head = GoldenInt::ZERO;
        for r in (0..prefix_len).rev() {
            head = head.mul_beta() + GoldenInt::new(((p >> r) & 1) as i64, 0);
        }
        let mut seen = HashSet::new();
        extend_words(head, suffix_len, &mut seen);
        seen
    });
    let mut all: HashSet<GoldenInt> = HashSet::new();
    for part in parts {
        all.extend(part);
    }
    Ok(all.len() as u64)
}

fn extend_words(value: GoldenInt, remaining: usize, seen: &mut HashSet<GoldenInt>) {
    if remaining == 0 {
        seen.insert(value);
        return;
    }
    let shifted = value.mul_beta();
    extend_words(shifted, remaining - 1, seen);
    extend_words(shifted + GoldenInt::ONE, remaining - 1, seen);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuRow {
    pub n: usize,
    pub count: u64,
    /// `count(n) / count(n - 1)`.
    pub ratio: Option<f64>,
    /// `count(n) / beta^n`.
    pub normalized: f64,
}

pub fn pu_growth_table(max_n: usize) -> Result<Vec<PuRow>> {
    let beta = golden_ratio();
    let mut rows: Vec<PuRow> = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        let count = pu_distinct_count(n)?;
        let ratio = rows.last().map(|r| count as f64 / r.count as f64);
        rows.push(PuRow { n, count, ratio, normalized: count as f64 / beta.powi(n as i32) });
    }
    Ok(rows)
}

/// `diag(1/beta, 1/2)` with translations `0` and `(1 - 1/beta, 1/2)`, so the
/// fixed points are `(0, 0)` and `(1, 1)`. Evidence carries the distinct-count
/// table up to `depth`.
pub fn make_przytycki_urbanski(depth: usize) -> Result<GalleryCase> {
    let beta = golden_ratio();
    let a = SquareMatrix::diag(&[1.0 / beta, 0.5]);
    let ifs = certified_pair(a.clone(), a, &vector(&[0.0, 0.0])?, &vector(&[1.0 - 1.0 / beta, 0.5])?)?;
    let table = pu_growth_table(depth)?;
    let sub_doubling = table.iter().filter(|r| r.n >= 4).all(|r| r.ratio.is_some_and(|q| q < 2.0));
    // phi^s of diag(1/beta, 1/2)^n is beta^-n 2^(-n(s-1)) on [1, 2]
    let affinity = 1.0 + (2.0 / beta).log2();
    Ok(GalleryCase {
        name: "przytycki-urbanski".into(),
        ifs,
        expected: Expected {
            algebra_dim: Some(2),
            max_subspace_dim: 2,
            subspace_dim: Some(2),
            affinity: Some(AffinityExpectation::Exact { value: affinity, tol: 1e-8 }),
            notes: vec!["distinct-count ratios stay below 2 and approach the golden ratio".into()],
        },
        evidence: vec![Evidence::check("distinct_counts", json!(table), sub_doubling)],
    })
}

/// Roots of `c_0 x^m + c_1 x^(m-1) + ... + c_m` (highest degree first) as
/// eigenvalues of the companion matrix, refined by Newton steps.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let lead = *coeffs.first().ok_or_else(|| invalid("empty polynomial"))?;
    if lead == 0.0 || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(invalid("leading coefficient must be non-zero and all coefficients finite"));
    }
    let m = coeffs.len() - 1;
    if m == 0 {
        return Ok(vec![]);
    }
    let mut data = vec![0.0; m * m];
    for j in 0..m {
        data[j] = -coeffs[j + 1] / lead;
    }
    for i in 1..m {
        data[i * m + i - 1] = 1.0;
    }
    let companion = SquareMatrix::new(m, data)?;
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in coeffs {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    Ok(eigenvalues(&companion)
        .into_iter()
        .map(|mut z| {
            for _ in 0..3 {
                let (p, dp) = eval(z);
                if dp.norm() == 0.0 {
                    break;
                }
                z -= p / dp;
            }
            z
        })
        .collect())
}

/// The root of `x^4 + x^3 + x^2 - x + 1` with positive imaginary part and
/// modulus below `1/sqrt 2`, if any.
pub fn complex_similarity_lambda() -> Option<Complex64> {
    polynomial_roots(&[1.0, 1.0, 1.0, -1.0, 1.0])
        .ok()?
        .into_iter()
        .filter(|z| z.im > 0.0 && z.norm() < std::f64::consts::FRAC_1_SQRT_2)
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
}

/// Real 2x2 form of multiplication by `re + i im`.
pub fn complex_as_matrix(re: f64, im: f64) -> SquareMatrix {
    SquareMatrix::from_rows(&[vec![re, -im], vec![im, re]]).expect("2x2")
}

/// `z -> lambda z + w_i` on `C = R^2` for non-real `lambda` with
/// `|lambda| < 1/sqrt 2`.
pub fn make_complex_similarity(lambda_re: f64, lambda_im: f64, w1: &RealVector, w2: &RealVector) -> Result<GalleryCase> {
    if lambda_im == 0.0 || !lambda_im.is_finite() || !lambda_re.is_finite() {
        return Err(invalid("lambda must be non-real"));
    }
    let modulus = lambda_re.hypot(lambda_im);
    if modulus >= std::f64::consts::FRAC_1_SQRT_2 {
        return Err(invalid(format!("|lambda| = {modulus} must be below 1/sqrt 2")));
    }
    check_dim(2, w1.dim())?;
    check_dim(2, w2.dim())?;
    if w1 == w2 {
        return Err(invalid("translations must be distinct"));
    }
    let a = complex_as_matrix(lambda_re, lambda_im);
    let ifs = certified_pair(a.clone(), a, w1, w2)?;
    Ok(GalleryCase {
        name: "complex-similarity".into(),
        ifs,
        expected: Expected {
            algebra_dim: Some(2),
            max_subspace_dim: 2,
            subspace_dim: Some(2),
            affinity: Some(AffinityExpectation::Exact { value: 2f64.ln() / (1.0 / modulus).ln(), tol: 1e-9 }),
            notes: vec![],
        },
        evidence: vec![Evidence::info("lambda", json!({ "re": lambda_re, "im": lambda_im, "modulus": modulus }))],
    })
}

/// Parameters of a manifest case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CaseParams {
    Simple {
        lambda: f64,
        v1: Vec<f64>,
        v2: Vec<f64>,
    },
    Example1 {
        epsilon: f64,
        phi: f64,
        psi: f64,
        v1: Vec<f64>,
        v2: Vec<f64>,
    },
    Example2 {
        alpha: [f64; 2],
        beta: [f64; 2],
        gamma: [f64; 2],
        v1: Vec<f64>,
        v2: Vec<f64>,
    },
    Example3 {
        matrices: Vec<Vec<Vec<f64>>>,
        k: usize,
        translations: Vec<Vec<f64>>,
    },
    SimonSolomyak {
        j_word: Vec<usize>,
        k_word: Vec<usize>,
        v1: Vec<f64>,
        v2: Vec<f64>,
    },
    PrzytyckiUrbanski {
        depth: usize,
    },
    ComplexSimilarity {
        /// `[re, im]`; `null` selects [`complex_similarity_lambda`].
        lambda: Option<[f64; 2]>,
        w1: Vec<f64>,
        w2: Vec<f64>,
        j_word: Vec<usize>,
        k_word: Vec<usize>,
    },
}

impl CaseParams {
    pub fn build(&self) -> Result<GalleryCase> {
        match self {
            CaseParams::Simple { lambda, v1, v2 } => make_simple(*lambda, &vector(v1)?, &vector(v2)?),
            CaseParams::Example1 { epsilon, phi, psi, v1, v2 } => {
                make_example1(*epsilon, *phi, *psi, &vector(v1)?, &vector(v2)?)
            }
            CaseParams::Example2 { alpha, beta, gamma, v1, v2 } => make_example2(
                (alpha[0], alpha[1]),
                (beta[0], beta[1]),
                (gamma[0], gamma[1]),
                &vector(v1)?,
                &vector(v2)?,
            ),
            CaseParams::Example3 { matrices, k, translations } => {
                let mats = matrices.iter().map(|m| SquareMatrix::from_rows(m)).collect::<Result<Vec<_>>>()?;
                let trans = translations.iter().map(|t| vector(t)).collect::<Result<Vec<_>>>()?;
                make_example3(&mats, *k, &trans)
            }
            CaseParams::SimonSolomyak { j_word, k_word, v1, v2 } => make_simon_solomyak(
                &Word::from_one_based(j_word, 2)?,
                &Word::from_one_based(k_word, 2)?,
                &vector(v1)?,
                &vector(v2)?,
            ),
            CaseParams::PrzytyckiUrbanski { depth } => make_przytycki_urbanski(*depth),
            CaseParams::ComplexSimilarity { lambda, w1, w2, j_word, k_word } => {
                let [re, im] = match lambda {
                    Some(l) => *l,
                    None => {
                        let z = complex_similarity_lambda()
                            .ok_or_else(|| Error::Refused("no root of modulus below 1/sqrt 2 found".into()))?;
                        [z.re, z.im]
                    }
                };
                let mut case = make_complex_similarity(re, im, &vector(w1)?, &vector(w2)?)?;
                let (j, k) = (Word::from_one_based(j_word, 2)?, Word::from_one_based(k_word, 2)?);
                let discrepancy = composition_discrepancy(&case.ifs, &j, &k)?;
                case.evidence.push(Evidence::check(
                    "composition_discrepancy",
                    json!({ "j": j.to_string(), "k": k.to_string(), "max": discrepancy }),
                    discrepancy <= 1e-12,
                ));
                case.expected.notes.push(format!("compositions {j} and {k} coincide"));
                Ok(case)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub description: String,
    pub params: CaseParams,
    pub expected: Expected,
}

/// Named default cases with their expected values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub cases: Vec<ManifestEntry>,
}

const MANIFEST_JSON: &str = include_str!("../data/gallery.json");

impl Manifest {
    /// The manifest bundled with the library.
    pub fn bundled() -> Manifest {
        serde_json::from_str(MANIFEST_JSON).expect("bundled gallery manifest is valid")
    }

    pub fn names(&self) -> Vec<&str> {
        self.cases.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&ManifestEntry> {
        self.cases.iter().find(|c| c.name == name)
    }

    /// Builds the named case with its manifest parameters; the manifest's
    /// expectations replace the constructor's.
    pub fn build(&self, name: &str) -> Result<GalleryCase> {
        let entry = self.get(name).ok_or_else(|| {
            invalid(format!("unknown gallery case {name:?}; known cases: {}", self.names().join(", ")))
        })?;
        let mut case = entry.params.build()?;
        case.name = entry.name.clone();
        case.expected = entry.expected.clone();
        Ok(case)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl CheckOutcome {
    fn new(check: &str, expected: impl fmt::Display, actual: impl fmt::Display, pass: bool) -> Self {
        CheckOutcome { check: check.into(), expected: expected.to_string(), actual: actual.to_string(), pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseEvaluation {
    pub name: String,
    pub bound: DimensionBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub affinity: Option<DimBracket>,
    pub checks: Vec<CheckOutcome>,
}

impl CaseEvaluation {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Recomputes a case and compares it with its expectations. `depth` bounds
/// product enumerations that the expectation does not fix itself.
pub fn evaluate(case: &GalleryCase, depth: usize, tol: &Tolerance) -> Result<CaseEvaluation> {
    if depth == 0 {
        return Err(invalid("depth must be at least 1"));
    }
    let exp = &case.expected;
    let bound = dimension_bound(&case.ifs, tol)?;
    let mats = case.ifs.linear_parts();
    let mut checks = Vec::new();
    if let Some(d) = exp.algebra_dim {
        checks.push(CheckOutcome::new("algebra_dim", d, bound.algebra_dim, d == bound.algebra_dim));
    }
    checks.push(CheckOutcome::new(
        "subspace_dim_at_most",
        exp.max_subspace_dim,
        bound.subspace_dim,
        bound.subspace_dim <= exp.max_subspace_dim,
    ));
    if let Some(d) = exp.subspace_dim {
        checks.push(CheckOutcome::new("subspace_dim", d, bound.subspace_dim, d == bound.subspace_dim));
    }
    checks.push(CheckOutcome::new(
        "dimension_bound",
        format!("<= min({}, {})", bound.bound, bound.ambient_dim),
        bound.subspace_dim,
        bound.holds,
    ));
    let depth = max_affordable_depth(case.ifs.n_maps(), depth, DEFAULT_WORD_CAP).max(1);
    let affinity = affinity_dim(&mats, depth, DEFAULT_ROOT_TOL).ok();
    match &exp.affinity {
        Some(AffinityExpectation::Exact { value, tol: t }) => {
            let actual = affinity.as_ref().map(|b| b.upper);
            let pass = actual.is_some_and(|a| (a - value).abs() <= *t);
            let shown = actual.map_or("unavailable".to_string(), |a| a.to_string());
            checks.push(CheckOutcome::new("affinity_dim", format!("{value} ± {t}"), shown, pass));
        }
        Some(AffinityExpectation::UpperAbove { threshold, depth: n }) => {
            let upper = affinity_dim_truncated(&mats, *n, DEFAULT_ROOT_TOL)?.upper;
            checks.push(CheckOutcome::new(
                "affinity_upper_bound",
                format!("> {threshold} at depth {n}"),
                upper,
                upper > *threshold,
            ));
        }
        Some(AffinityExpectation::CertifiedAbove { threshold }) => {
            let lower = lsr_bracket(&mats, depth)?.certified_lower;
            let witness = mats.len() as f64 * lower.powf(*threshold);
            checks.push(CheckOutcome::new(
                "affinity_certified_above",
                format!("N * lsr_lower^{threshold} > 1"),
                witness,
                witness > 1.0,
            ));
        }
        None => {}
    }
    for ev in &case.evidence {
        if let Some(pass) = ev.pass {
            checks.push(CheckOutcome::new(&ev.label, "holds", &ev.value, pass));
        }
    }
    Ok(CaseEvaluation { name: case.name.clone(), bound, affinity, checks })
}

/// Dimension of the algebra generated by the linear parts of a case and of
/// its minimal invariant subspace.
pub fn case_dimensions(case: &GalleryCase, tol: &Tolerance) -> Result<(usize, usize)> {
    let alg = unital_algebra_closure(&case.ifs.linear_parts(), tol)?;
    let x = minimal_invariant_affine_subspace(&case.ifs, tol)?;
    Ok((alg.dim(), x.dim()))
}
