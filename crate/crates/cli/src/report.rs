//! Analysis pipeline behind `analyze` and `gallery`.

use serde::Serialize;

use ifslab::algebra::unital_algebra_closure;
use ifslab::attractor::{box_count_auto, chaos_game, max_distance_to_affine, affine_hull_dim, BoxCountWarning};
use ifslab::dimension::{
    affinity_dim, jsr_bracket, lsr_upper, max_affordable_depth, DimMethod, DEFAULT_ROOT_TOL, DEFAULT_WORD_CAP,
    SIMILARITY_TOL,
};
use ifslab::invariant::{
    admits_invariant_subspace, check_ell_hypothesis, minimal_invariant_affine_subspace, AffineIfs, Contraction,
};
use ifslab::Tolerance;

use crate::document::IfsDocument;
use crate::error::{CliError, ErrorKind};

/// Every warning a report can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Warning {
    /// No contraction certificate was found; `--force` proceeded anyway.
    ContractionAssumed,
    /// The requested depth exceeded the product budget and was lowered.
    DepthClipped,
    /// A requested `ell` violates `1 <= N - 1 <= ell < d`; its entry is null.
    EllOutsideHypothesis,
    /// Some linear part is singular or has operator norm `>= 1`, so no
    /// affinity-dimension bracket is reported.
    AffinityDimensionUnavailable,
    /// The sampled cloud is a single point.
    BoxCountDegenerate,
    /// Box counts at the finest fitted scale are limited by the sample size.
    BoxCountSaturated,
}

impl Warning {
    pub const ALL: [Warning; 6] = [
        Warning::ContractionAssumed,
        Warning::DepthClipped,
        Warning::EllOutsideHypothesis,
        Warning::AffinityDimensionUnavailable,
        Warning::BoxCountDegenerate,
        Warning::BoxCountSaturated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Warning::ContractionAssumed => "contraction-assumed",
            Warning::DepthClipped => "depth-clipped",
            Warning::EllOutsideHypothesis => "ell-outside-hypothesis",
            Warning::AffinityDimensionUnavailable => "affinity-dimension-unavailable",
            Warning::BoxCountDegenerate => "box-count-degenerate",
            Warning::BoxCountSaturated => "box-count-saturated",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub depth: usize,
    pub ells: Vec<usize>,
    pub sample: Option<usize>,
    pub burn_in: usize,
    pub seed: u64,
    pub tol: f64,
    pub force: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            depth: 8,
            ells: vec![],
            sample: None,
            burn_in: 100,
            seed: 0,
            tol: Tolerance::DEFAULT_REL,
            force: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub sha256: String,
    pub dim: usize,
    pub n_maps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EllEntry {
    pub ell: usize,
    pub value: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AffinityEntry {
    pub lower: Option<f64>,
    pub upper: f64,
    pub depth: usize,
    pub method: DimMethod,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsrEntry {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleEntry {
    pub points: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub error_bound: Option<f64>,
    pub slope: f64,
    pub r2: f64,
    pub levels: Vec<i32>,
    pub counts: Vec<usize>,
    pub max_distance_to_x: f64,
    pub hull_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub rank_rel: f64,
    pub root: f64,
    pub similarity: f64,
    pub word_cap: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub input: InputEcho,
    #[serde(rename = "D")]
    pub algebra_dim: usize,
    pub bound: usize,
    #[serde(rename = "dim_X")]
    pub dim_x: usize,
    pub base: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    #[serde(rename = "in_Z_ell")]
    pub in_z_ell: Vec<EllEntry>,
    pub dim_aff: Option<AffinityEntry>,
    pub jsr: JsrEntry,
    pub lsr_upper: f64,
    pub contraction: Contraction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_count: Option<SampleEntry>,
    pub tolerances: Tolerances,
    pub warnings: Vec<Warning>,
}

/// Certifies (or, with `force`, assumes) contraction and runs every
/// analysis on `ifs`. The document only supplies the echoed hash and name.
pub fn analyze(doc: &IfsDocument, mut ifs: AffineIfs, opts: &AnalyzeOptions) -> Result<AnalysisReport, CliError> {
    if opts.depth == 0 {
        return Err(CliError::usage("--depth must be at least 1"));
    }
    let tol = Tolerance::new(opts.tol, "analysis").map_err(CliError::from)?;
    let mut warnings = Vec::new();
    let n = ifs.n_maps();
    let d = ifs.dim();
    let depth = max_affordable_depth(n, opts.depth, DEFAULT_WORD_CAP);
    if depth < opts.depth {
        warnings.push(Warning::DepthClipped);
    }
    let depth = depth.max(1);

    let jsr = jsr_bracket(&ifs.linear_parts(), depth)?;
    if ifs.certificate().is_none() && ifs.certify(depth).is_none() {
        if !opts.force {
            return Err(CliError::new(
                ErrorKind::Refused,
                format!(
                    "no contraction certificate up to depth {depth} (joint spectral radius bracket [{}, {}]); \
                     pass --force to proceed",
                    jsr.lower, jsr.upper
                ),
            ));
        }
        ifs = ifs.assume_contracting();
        warnings.push(Warning::ContractionAssumed);
    }
    let mats = ifs.linear_parts();

    let x = minimal_invariant_affine_subspace(&ifs, &tol)?;
    let alg = unital_algebra_closure(&mats, &tol)?;
    let bound = (n - 1) * alg.dim();

    let mut in_z_ell = Vec::new();
    for &ell in &opts.ells {
        let value = match check_ell_hypothesis(n, ell, d) {
            Ok(()) => Some(admits_invariant_subspace(&ifs, ell, &tol)?),
            Err(_) => {
                warnings.push(Warning::EllOutsideHypothesis);
                None
            }
        };
        in_z_ell.push(EllEntry { ell, value });
    }

    let dim_aff = match affinity_dim(&mats, depth, DEFAULT_ROOT_TOL) {
        Ok(b) => Some(AffinityEntry { lower: b.lower, upper: b.upper, depth: b.depth, method: b.method }),
        Err(_) => {
            warnings.push(Warning::AffinityDimensionUnavailable);
            None
        }
    };
    let lsr = lsr_upper(&mats, depth)?;

    let box_count = match opts.sample {
        None => None,
        Some(iterations) => {
            let cloud = chaos_game(&ifs, iterations, opts.burn_in, opts.seed, &tol)?;
            let est = box_count_auto(&cloud)?;
            for w in &est.warnings {
                warnings.push(match w {
                    BoxCountWarning::DegenerateCloud => Warning::BoxCountDegenerate,
                    BoxCountWarning::Saturated => Warning::BoxCountSaturated,
                });
            }
            Some(SampleEntry {
                points: cloud.len(),
                burn_in: opts.burn_in,
                seed: opts.seed,
                error_bound: cloud.meta.error_bound,
                slope: est.slope,
                r2: est.r2,
                levels: est.levels,
                counts: est.counts,
                max_distance_to_x: max_distance_to_affine(&cloud, &x)?,
                hull_dim: affine_hull_dim(&cloud, &tol)?,
            })
        }
    };
    warnings.sort();
    warnings.dedup();

    Ok(AnalysisReport {
        input: InputEcho { name: doc.name.clone(), sha256: doc.sha256(), dim: d, n_maps: n },
        algebra_dim: alg.dim(),
        bound,
        dim_x: x.dim(),
        base: x.base.as_slice().to_vec(),
        directions: x.directions.vectors().iter().map(|v| v.as_slice().to_vec()).collect(),
        in_z_ell,
        dim_aff,
        jsr: JsrEntry { lower: jsr.lower, upper: jsr.upper, depth: jsr.depth },
        lsr_upper: lsr,
        contraction: ifs.contraction(),
        box_count,
        tolerances: Tolerances {
            rank_rel: opts.tol,
            root: DEFAULT_ROOT_TOL,
            similarity: SIMILARITY_TOL,
            word_cap: DEFAULT_WORD_CAP,
        },
        warnings,
    })
}
