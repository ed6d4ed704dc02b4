use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use ifslab::attractor::chaos_game;
use ifslab::gallery::{evaluate, CaseEvaluation, CaseParams, Evidence, Expected, Manifest};
use ifslab::Tolerance;

use crate::document::IfsDocument;
use crate::error::{CliError, ErrorKind};
use crate::report::{analyze, AnalysisReport, AnalyzeOptions};

pub fn read_document(path: &Path) -> Result<IfsDocument, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(ErrorKind::Io, format!("cannot read {}: {e}", path.display())))?;
    IfsDocument::parse(&text)
}

/// Writes `bytes` to `out` through a temporary file in the same directory,
/// or to standard output when `out` is `None`.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let mut tmp = NamedTempFile::new_in(&dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| CliError::from(e.error))?;
            Ok(())
        }
    }
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("reports always serialize");
    bytes.push(b'\n');
    bytes
}

pub fn cmd_analyze(path: &Path, opts: &AnalyzeOptions) -> Result<AnalysisReport, CliError> {
    let doc = read_document(path)?;
    let ifs = doc.to_ifs()?;
    analyze(&doc, ifs, opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct GalleryOutput {
    pub case: String,
    pub params: CaseParams,
    pub expected: Expected,
    pub evidence: Vec<Evidence>,
    pub evaluation: CaseEvaluation,
    pub passed: bool,
    pub report: AnalysisReport,
}

/// Runs a manifest case. A `depth` given on the command line also sets the
/// distinct-count depth of the `przytycki-urbanski` case.
pub fn cmd_gallery(name: &str, depth_flag: Option<usize>, opts: &AnalyzeOptions) -> Result<GalleryOutput, CliError> {
    let manifest = Manifest::bundled();
    let entry = manifest.get(name).ok_or_else(|| {
        CliError::usage(format!("unknown gallery case {name:?}; valid names: {}", manifest.names().join(", ")))
    })?;
    let mut params = entry.params.clone();
    if let (CaseParams::PrzytyckiUrbanski { depth }, Some(flag)) = (&mut params, depth_flag) {
        *depth = flag;
    }
    let mut case = params.build()?;
    case.name = entry.name.clone();
    case.expected = entry.expected.clone();
    let tol = Tolerance::new(opts.tol, "gallery").map_err(CliError::from)?;
    let evaluation = evaluate(&case, opts.depth, &tol)?;
    let doc = IfsDocument::from_ifs(Some(case.name.clone()), &case.ifs);
    let report = analyze(&doc, case.ifs.clone(), opts)?;
    Ok(GalleryOutput {
        case: case.name,
        params,
        expected: case.expected,
        evidence: case.evidence,
        passed: evaluation.passed(),
        evaluation,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Csv,
    Pgm,
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub format: RenderFormat,
    pub axes: (usize, usize),
    pub size: usize,
    pub depth: usize,
    pub force: bool,
}

pub fn cmd_render(path: &Path, opts: &RenderOptions) -> Result<Vec<u8>, CliError> {
    let doc = read_document(path)?;
    render_document(&doc, opts)
}

pub fn render_document(doc: &IfsDocument, opts: &RenderOptions) -> Result<Vec<u8>, CliError> {
    if opts.iterations <= opts.burn_in {
        return Err(CliError::usage(format!(
            "--iters ({}) must exceed --burn ({})",
            opts.iterations, opts.burn_in
        )));
    }
    if opts.format == RenderFormat::Pgm {
        let (i, j) = opts.axes;
        if doc.dim < 2 {
            return Err(CliError::usage("pgm output needs dimension at least 2"));
        }
        if i >= j || j >= doc.dim {
            return Err(CliError::usage(format!(
                "projection axes must satisfy i < j < {}, got ({i}, {j})",
                doc.dim
            )));
        }
        if opts.size == 0 {
            return Err(CliError::usage("--size must be positive"));
        }
    }
    let mut ifs = doc.to_ifs()?;
    if ifs.certify(opts.depth.max(1)).is_none() {
        if !opts.force {
            return Err(CliError::new(
                ErrorKind::Refused,
                format!("no contraction certificate up to depth {}; pass --force to proceed", opts.depth),
            ));
        }
        ifs = ifs.assume_contracting();
    }
    let cloud = chaos_game(&ifs, opts.iterations, opts.burn_in, opts.seed, &Tolerance::default())?;
    match opts.format {
        RenderFormat::Csv => {
            let mut buf = Vec::new();
            cloud.write_csv(&mut buf)?;
            Ok(buf)
        }
        RenderFormat::Pgm => Ok(cloud.to_pgm(opts.axes.0, opts.axes.1, opts.size, opts.size)?),
    }
}
