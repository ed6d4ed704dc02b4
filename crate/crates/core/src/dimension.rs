//! Singular value function, affinity dimension and spectral-radius brackets.
//!
//! Everything that sums or maximises over products `A_{i_1} ... A_{i_n}`
//! goes through one depth-first enumerator. Each product extends its prefix
//! by a single multiplication, the tree is split into prefix subtrees that
//! run concurrently, and per-subtree results are merged in prefix order so
//! the output does not depend on the thread count.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{singular_values, spectral_radius, SquareMatrix};
use crate::par;

/// Default cap on the number of products visited by one enumeration.
pub const DEFAULT_WORD_CAP: u64 = 2_000_000;

/// Default bisection tolerance for truncated affinity-dimension roots.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

/// Target number of prefix subtrees handed to the worker pool.
const MIN_TASKS: u128 = 64;

/// A word `(i_1, ..., i_n)` over an alphabet of `n_maps` letters, stored
/// zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<usize>,
}

impl Word {
    pub fn new(letters: Vec<usize>, n_maps: usize) -> Result<Self> {
        if letters.is_empty() {
            return Err(invalid("a word has length at least 1"));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l >= n_maps) {
            return Err(invalid(format!("letter {} out of range 1..={n_maps}", bad + 1)));
        }
        Ok(Word { letters })
    }

    /// From letters numbered `1..=n_maps`.
    pub fn from_one_based(letters: &[usize], n_maps: usize) -> Result<Self> {
        if letters.contains(&0) {
            return Err(invalid("one-based letters start at 1"));
        }
        Self::new(letters.iter().map(|l| l - 1).collect(), n_maps)
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| (l + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `phi^s` evaluated from singular values in decreasing order.
pub(crate) fn phi_from_singular_values(sv: &[f64], s: f64) -> f64 {
    let d = sv.len();
    if s <= d as f64 {
        let k = s.floor() as usize;
        let frac = s - k as f64;
        let mut p: f64 = sv[..k].iter().product();
        if frac > 0.0 {
            p *= sv[k].powf(frac);
        }
        p
    } else {
        let det: f64 = sv.iter().product();
        det.powf(s / d as f64)
    }
}

/// Singular value function: `s1 ... s_floor(s) * s_ceil(s)^(s - floor(s))`
/// for `0 <= s <= d`, and `|det A|^(s/d)` beyond.
pub fn singular_value_function(a: &SquareMatrix, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(invalid(format!("singular value function needs finite s >= 0, got {s}")));
    }
    Ok(phi_from_singular_values(&singular_values(a)?, s))
}

fn common_dim(mats: &[SquareMatrix]) -> Result<usize> {
    let first = mats.first().ok_or_else(|| invalid("at least one matrix is required"))?;
    for m in mats {
        check_dim(first.dim(), m.dim())?;
    }
    Ok(first.dim())
}

fn words_of_length(n_maps: usize, depth: usize) -> u128 {
    (n_maps as u128).saturating_pow(depth as u32)
}

fn words_up_to(n_maps: usize, depth: usize) -> u128 {
    (1..=depth).fold(0u128, |acc, k| acc.saturating_add(words_of_length(n_maps, k)))
}

fn check_budget(words: u128, cap: u64) -> Result<()> {
    if words > cap as u128 {
        Err(Error::Budget { words, cap })
    } else {
        Ok(())
    }
}

/// Deepest `n` with `sum_{k<=n} N^k <= cap`, at most `max_depth`.
pub fn max_affordable_depth(n_maps: usize, max_depth: usize, cap: u64) -> usize {
    (1..=max_depth).take_while(|&n| words_up_to(n_maps, n) <= cap as u128).last().unwrap_or(0)
}

/// Calls `visit(acc, len, product)` for every product of length
/// `1..=max_depth`. Subtrees below a fixed-length prefix run as separate
/// tasks; their accumulators come back in prefix order.
fn fold_products<T, I, V>(mats: &[SquareMatrix], max_depth: usize, init: I, visit: V) -> Vec<T>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    V: Fn(&mut T, usize, &SquareMatrix) + Sync + Send,
{
    let n_maps = mats.len();
    let d = mats[0].dim();
    let mut prefix_len = 1;
    while prefix_len < max_depth && words_of_length(n_maps, prefix_len) < MIN_TASKS {
        prefix_len += 1;
    }
    let tasks = words_of_length(n_maps, prefix_len) as usize;
    par::map_indexed(tasks, |task| {
        // most significant digit first
        let mut prefix = vec![0usize; prefix_len];
        let mut t = task;
        for slot in prefix.iter_mut().rev() {
            *slot = t % n_maps;
            t /= n_maps;
        }
        let mut acc = init();
        let mut bufs: Vec<SquareMatrix> = (0..=max_depth).map(|_| SquareMatrix::zeros(d)).collect();
        bufs[0] = SquareMatrix::identity(d);
        for k in 0..prefix_len {
            let (lo, hi) = bufs.split_at_mut(k + 1);
            lo[k].mul_into(&mats[prefix[k]], &mut hi[0]);
            // a shorter word is owned by the task that pads it with zeros
            if k + 1 < prefix_len && prefix[k + 1..].iter().all(|&l| l == 0) {
                visit(&mut acc, k + 1, &bufs[k + 1]);
            }
        }
        descend(mats, prefix_len, max_depth, &mut bufs, &mut acc, &visit);
        acc
    })
}

fn descend<T, V>(mats: &[SquareMatrix], depth: usize, max_depth: usize, bufs: &mut [SquareMatrix], acc: &mut T, visit: &V)
where
    V: Fn(&mut T, usize, &SquareMatrix),
{
    visit(acc, depth, &bufs[depth]);
    if depth == max_depth {
        return;
    }
    for m in mats {
        let (lo, hi) = bufs.split_at_mut(depth + 1);
        lo[depth].mul_into(m, &mut hi[0]);
        descend(mats, depth + 1, max_depth, bufs, acc, visit);
    }
}

/// `sum over words of length n of phi^s(A_{i_1} ... A_{i_n})`, enumerated
/// exactly under a cap of [`DEFAULT_WORD_CAP`] words.
pub fn partition_function(mats: &[SquareMatrix], s: f64, n: usize) -> Result<f64> {
    partition_function_capped(mats, s, n, DEFAULT_WORD_CAP)
}

pub fn partition_function_capped(mats: &[SquareMatrix], s: f64, n: usize, cap: u64) -> Result<f64> {
    common_dim(mats)?;
    if n == 0 {
        return Err(invalid("word length must be at least 1"));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(invalid(format!("s must be finite and >= 0, got {s}")));
    }
    check_budget(words_of_length(mats.len(), n), cap)?;
    let partial = fold_products(
        mats,
        n,
        || 0.0f64,
        |acc, len, p| {
            if len == n {
                let sv = singular_values(p).unwrap_or_else(|_| vec![f64::INFINITY; p.dim()]);
                *acc += phi_from_singular_values(&sv, s);
            }
        },
    );
    Ok(par::pairwise_sum(&partial))
}

/// Singular values of every product of length `depth`, for fast repeated
/// evaluation of the partition function at different `s`.
#[derive(Debug, Clone)]
pub struct ProductSpectra {
    pub depth: usize,
    dim: usize,
    /// Per word: cumulative sums of `ln sigma_i`, `dim` entries each.
    log_cumulative: Vec<f64>,
    log_sigma: Vec<f64>,
}

impl ProductSpectra {
    pub fn word_count(&self) -> usize {
        self.log_sigma.len() / self.dim
    }

    pub fn partition(&self, s: f64) -> f64 {
        let d = self.dim;
        let terms: Vec<f64> = self
            .log_sigma
            .chunks(d)
            .zip(self.log_cumulative.chunks(d))
            .map(|(ls, cum)| {
                if s <= d as f64 {
                    let k = s.floor() as usize;
                    let frac = s - k as f64;
                    let mut e = if k == 0 { 0.0 } else { cum[k - 1] };
                    if frac > 0.0 {
                        e += frac * ls[k];
                    }
                    e.exp()
                } else {
                    (cum[d - 1] * s / d as f64).exp()
                }
            })
            .collect();
        par::pairwise_sum(&terms)
    }
}

/// Spectra of all products of every length `1..=max_depth`.
fn spectra_by_depth(mats: &[SquareMatrix], max_depth: usize) -> Vec<ProductSpectra> {
    let d = mats[0].dim();
    let parts = fold_products(
        mats,
        max_depth,
        || vec![Vec::<f64>::new(); max_depth],
        |acc, len, p| {
            let sv = singular_values(p).unwrap_or_else(|_| vec![f64::INFINITY; p.dim()]);
            acc[len - 1].extend(sv.iter().map(|x| x.ln()));
        },
    );
    (1..=max_depth)
        .map(|n| {
            let log_sigma: Vec<f64> = parts.iter().flat_map(|p| p[n - 1].iter().copied()).collect();
            let mut log_cumulative = Vec::with_capacity(log_sigma.len());
            for chunk in log_sigma.chunks(d) {
                let mut c = 0.0;
                for &x in chunk {
                    c += x;
                    log_cumulative.push(c);
                }
            }
            ProductSpectra { depth: n, dim: d, log_cumulative, log_sigma }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimMethod {
    SimilarityExact,
    TruncatedPressure,
}

/// Bracket on the affinity dimension. Outside the similarity case only an
/// upper bound is reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimBracket {
    pub lower: Option<f64>,
    pub upper: f64,
    pub depth: usize,
    pub method: DimMethod,
    /// Root `s_n` of the length-`n` partition equation, for `n = 1..=depth`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub roots_by_depth: Vec<f64>,
}

/// Relative spread of singular values below which a matrix counts as a
/// similarity `r O` with `O` orthogonal.
pub const SIMILARITY_TOL: f64 = 1e-9;

/// Contraction ratio if `a` is a similarity.
pub fn similarity_ratio(a: &SquareMatrix) -> Option<f64> {
    let sv = singular_values(a).ok()?;
    let (hi, lo) = (sv[0], sv[sv.len() - 1]);
    (hi > 0.0 && hi - lo <= SIMILARITY_TOL * hi).then_some(hi)
}

fn check_contracting_invertible(mats: &[SquareMatrix]) -> Result<()> {
    for (i, m) in mats.iter().enumerate() {
        let sv = singular_values(m)?;
        if sv[0] >= 1.0 {
            return Err(invalid(format!(
                "matrix {} has operator norm {} >= 1; certify the joint spectral radius and renormalise first",
                i + 1,
                sv[0]
            )));
        }
        if sv[sv.len() - 1] <= f64::EPSILON * sv[0] {
            return Err(invalid(format!("matrix {} is not invertible", i + 1)));
        }
    }
    Ok(())
}

/// Affinity dimension: exact when every matrix is a similarity, otherwise
/// the truncated-pressure upper bound of [`affinity_dim_truncated`].
pub fn affinity_dim(mats: &[SquareMatrix], max_depth: usize, tol: f64) -> Result<DimBracket> {
    common_dim(mats)?;
    check_contracting_invertible(mats)?;
    let ratios: Option<Vec<f64>> = mats.iter().map(similarity_ratio).collect();
    match ratios {
        Some(r) => {
            let s = affinity_dim_similarity(&r)?;
            Ok(DimBracket { lower: Some(s), upper: s, depth: 1, method: DimMethod::SimilarityExact, roots_by_depth: vec![] })
        }
        None => affinity_dim_truncated(mats, max_depth, tol),
    }
}

/// Upper bound `min_n s_n` where `s_n` solves `P_n(s) = 1`, `P_n` being the
/// length-`n` partition function. Each `s_n` bounds the affinity dimension
/// from above because `phi^s` is submultiplicative.
pub fn affinity_dim_truncated(mats: &[SquareMatrix], max_depth: usize, tol: f64) -> Result<DimBracket> {
    let d = common_dim(mats)?;
    check_contracting_invertible(mats)?;
    if max_depth == 0 {
        return Err(invalid("depth must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(invalid("bisection tolerance must be positive"));
    }
    check_budget(words_up_to(mats.len(), max_depth), DEFAULT_WORD_CAP)?;
    let spectra = spectra_by_depth(mats, max_depth);
    let mut roots = Vec::with_capacity(max_depth);
    for sp in &spectra {
        roots.push(decreasing_root(|s| sp.partition(s) - 1.0, 2.0 * d as f64, tol)?);
    }
    let upper = roots.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DimBracket { lower: None, upper, depth: max_depth, method: DimMethod::TruncatedPressure, roots_by_depth: roots })
}

/// Root of a strictly decreasing `f` with `f(0) >= 0`, by bisection. The
/// initial bracket `[0, hi]` is doubled until `f(hi) <= 0`. Returns the
/// right end of the final bracket, so `f(result) <= 0`.
fn decreasing_root<F: Fn(f64) -> f64>(f: F, mut hi: f64, tol: f64) -> Result<f64> {
    let mut lo = 0.0;
    if f(lo) <= 0.0 {
        return Ok(0.0);
    }
    let mut doublings = 0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(invalid("no root found: partition sums do not decay"));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Unique `s >= 0` with `sum r_i^s = 1`, to full double precision.
pub fn affinity_dim_similarity(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(invalid("at least one ratio is required"));
    }
    if let Some(r) = ratios.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
        return Err(invalid(format!("similarity ratios must lie in (0, 1), got {r}")));
    }
    let f = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    let hi = decreasing_root(f, 1.0, 0.0)?;
    // the bracket has collapsed to adjacent floats; keep the closer one
    let lo = f64::from_bits(hi.to_bits().saturating_sub(1));
    Ok(if f(lo).abs() < f(hi).abs() { lo } else { hi })
}

/// Extremes over all products of one length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepthStats {
    pub depth: usize,
    pub max_norm: f64,
    pub min_norm: f64,
    pub min_sigma_min: f64,
    /// `NaN` unless eigenvalues were requested.
    pub max_rho: f64,
    pub min_rho: f64,
}

impl DepthStats {
    fn empty(depth: usize) -> Self {
        DepthStats {
            depth,
            max_norm: 0.0,
            min_norm: f64::INFINITY,
            min_sigma_min: f64::INFINITY,
            max_rho: f64::NAN,
            min_rho: f64::NAN,
        }
    }

    fn merge(&mut self, o: &DepthStats) {
        self.max_norm = self.max_norm.max(o.max_norm);
        self.min_norm = self.min_norm.min(o.min_norm);
        self.min_sigma_min = self.min_sigma_min.min(o.min_sigma_min);
        self.max_rho = nan_max(self.max_rho, o.max_rho);
        self.min_rho = nan_min(self.min_rho, o.min_rho);
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() {
        b
    } else if b.is_nan() {
        a
    } else {
        a.max(b)
    }
}

fn nan_min(a: f64, b: f64) -> f64 {
    if a.is_nan() {
        b
    } else if b.is_nan() {
        a
    } else {
        a.min(b)
    }
}

/// Norm and (optionally) spectral-radius extremes for every length
/// `1..=max_depth`.
pub fn product_stats(mats: &[SquareMatrix], max_depth: usize, with_eigen: bool, cap: u64) -> Result<Vec<DepthStats>> {
    common_dim(mats)?;
    if max_depth == 0 {
        return Err(invalid("depth must be at least 1"));
    }
    check_budget(words_up_to(mats.len(), max_depth), cap)?;
    let parts = fold_products(
        mats,
        max_depth,
        || (1..=max_depth).map(DepthStats::empty).collect::<Vec<_>>(),
        |acc, len, p| {
            let sv = singular_values(p).unwrap_or_else(|_| vec![f64::INFINITY; p.dim()]);
            let st = &mut acc[len - 1];
            st.max_norm = st.max_norm.max(sv[0]);
            st.min_norm = st.min_norm.min(sv[0]);
            st.min_sigma_min = st.min_sigma_min.min(sv[sv.len() - 1]);
            if with_eigen {
                let rho = spectral_radius(p);
                st.max_rho = nan_max(st.max_rho, rho);
                st.min_rho = nan_min(st.min_rho, rho);
            }
        },
    );
    let mut out: Vec<DepthStats> = (1..=max_depth).map(DepthStats::empty).collect();
    for part in &parts {
        for (o, p) in out.iter_mut().zip(part) {
            o.merge(p);
        }
    }
    Ok(out)
}

/// Joint spectral radius bracket from norms (upper) and spectral radii
/// (lower, Gelfand) of all products up to a depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
    /// Running minimum of `max |A_w|^(1/n)`, one entry per depth.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub upper_by_depth: Vec<f64>,
}

pub fn jsr_bracket(mats: &[SquareMatrix], max_depth: usize) -> Result<SpectralBracket> {
    let stats = product_stats(mats, max_depth, true, DEFAULT_WORD_CAP)?;
    let mut upper = f64::INFINITY;
    let mut lower: f64 = 0.0;
    let mut upper_by_depth = Vec::with_capacity(stats.len());
    for st in &stats {
        let n = st.depth as f64;
        upper = upper.min(st.max_norm.powf(1.0 / n));
        lower = lower.max(st.max_rho.powf(1.0 / n));
        upper_by_depth.push(upper);
    }
    Ok(SpectralBracket { lower, upper, depth: max_depth, upper_by_depth })
}

/// Bounds on the lower spectral radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsrBound {
    /// `min_n min_w |A_w|^(1/n)`: certified upper bound.
    pub upper: f64,
    /// `max_n min_w sigma_min(A_w)^(1/n)`: certified lower bound (every long
    /// product splits into blocks of length `n`).
    pub certified_lower: f64,
    /// `min_w rho(A_w)^(1/n)` at the deepest level. Not a certified bound.
    pub heuristic_lower: f64,
    pub depth: usize,
}

pub fn lsr_bracket(mats: &[SquareMatrix], max_depth: usize) -> Result<LsrBound> {
    let stats = product_stats(mats, max_depth, true, DEFAULT_WORD_CAP)?;
    let mut upper = f64::INFINITY;
    let mut certified_lower: f64 = 0.0;
    for st in &stats {
        let n = st.depth as f64;
        upper = upper.min(st.min_norm.powf(1.0 / n));
        certified_lower = certified_lower.max(st.min_sigma_min.powf(1.0 / n));
    }
    let last = stats.last().expect("depth >= 1");
    let heuristic_lower = last.min_rho.powf(1.0 / last.depth as f64);
    Ok(LsrBound { upper, certified_lower, heuristic_lower, depth: max_depth })
}

/// Certified upper bound on the lower spectral radius.
pub fn lsr_upper(mats: &[SquareMatrix], max_depth: usize) -> Result<f64> {
    lsr_bracket(mats, max_depth).map(|b| b.upper)
}

/// Evidence that every long product contracts: all products of length
/// `depth` have Euclidean norm at most `bound^depth < 1`, and every product
/// of length `k` has norm at most `constant * bound^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub depth: usize,
    pub bound: f64,
    pub constant: f64,
}

/// First depth (up to `max_depth`, clipped to the word budget) at which the
/// joint-spectral-radius upper bound drops below 1.
pub fn contraction_certificate(mats: &[SquareMatrix], max_depth: usize) -> Option<ContractionCertificate> {
    common_dim(mats).ok()?;
    let depth = max_affordable_depth(mats.len(), max_depth, DEFAULT_WORD_CAP);
    if depth == 0 {
        return None;
    }
    let stats = product_stats(mats, depth, false, DEFAULT_WORD_CAP).ok()?;
    let hit = stats.iter().find(|st| st.max_norm.powf(1.0 / st.depth as f64) < 1.0)?;
    let n = hit.depth;
    let bound = hit.max_norm.powf(1.0 / n as f64);
    // products of length q n + r are bounded by (bound^n)^q * M_r
    let mut constant: f64 = 1.0;
    for st in &stats[..n - 1] {
        if bound > 0.0 {
            constant = constant.max(st.max_norm / bound.powi(st.depth as i32));
        }
    }
    Some(ContractionCertificate { depth: n, bound, constant })
}
