use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ifslab::gallery::Manifest;
use ifslab_cli::commands::{cmd_analyze, cmd_gallery, cmd_render, emit, to_json_bytes, RenderFormat, RenderOptions};
use ifslab_cli::{AnalyzeOptions, CliError, ErrorKind};

#[derive(Parser)]
#[command(name = "ifslab", about = "Invariant subspaces and dimensions of affine iterated function systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct AnalysisFlags {
    /// Longest product length enumerated for brackets and certificates
    /// [default: 8].
    #[arg(long)]
    depth: Option<usize>,
    /// Report membership in Z_ell for each value.
    #[arg(long = "ell", num_args = 1.., action = clap::ArgAction::Append)]
    ells: Vec<usize>,
    /// Sample this many chaos-game points and box-count them.
    #[arg(long)]
    sample: Option<usize>,
    /// Chaos-game points discarded before sampling.
    #[arg(long, default_value_t = 100)]
    burn: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative rank tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Proceed without a contraction certificate.
    #[arg(long)]
    force: bool,
}

impl AnalysisFlags {
    fn options(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            depth: self.depth.unwrap_or(AnalyzeOptions::default().depth),
            ells: self.ells.clone(),
            sample: self.sample,
            burn_in: self.burn,
            seed: self.seed,
            tol: self.tol,
            force: self.force,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Pgm,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse an IFS document and print a JSON report.
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
    /// Run a named example; without a name, print the manifest.
    Gallery {
        name: Option<String>,
        #[command(flatten)]
        flags: AnalysisFlags,
    },
    /// Sample the attractor and write CSV or PGM.
    Render {
        path: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        iters: usize,
        #[arg(long, default_value_t = 100)]
        burn: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Zero-based coordinate axes (i < j) of the PGM projection.
        #[arg(long, num_args = 2, value_names = ["I", "J"], default_values_t = [0, 1])]
        project: Vec<usize>,
        /// Side length of the PGM raster in pixels.
        #[arg(long, default_value_t = 512)]
        size: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print version information as JSON.
    Version,
}

fn apply_thread_limit() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("IFSLAB_THREADS") else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            ifslab::par::set_thread_limit(n);
            Ok(())
        }
        _ => Err(CliError::usage(format!("IFSLAB_THREADS must be a positive integer, got {raw:?}"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    apply_thread_limit()?;
    match cli.command {
        Command::Analyze { path, flags } => {
            let report = cmd_analyze(&path, &flags.options())?;
            emit(flags.out.as_deref(), &to_json_bytes(&report))
        }
        Command::Gallery { name: None, flags } => emit(flags.out.as_deref(), &to_json_bytes(&Manifest::bundled())),
        Command::Gallery { name: Some(name), flags } => {
            let out = cmd_gallery(&name, flags.depth, &flags.options())?;
            emit(flags.out.as_deref(), &to_json_bytes(&out))?;
            if out.passed {
                Ok(())
            } else {
                let failed: Vec<&str> =
                    out.evaluation.checks.iter().filter(|c| !c.pass).map(|c| c.check.as_str()).collect();
                Err(CliError::new(ErrorKind::CheckFailed, format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::Render { path, iters, burn, seed, format, project, size, depth, force, out } => {
            let opts = RenderOptions {
                iterations: iters,
                burn_in: burn,
                seed,
                format: match format {
                    Format::Csv => RenderFormat::Csv,
                    Format::Pgm => RenderFormat::Pgm,
                },
                axes: (project[0], project[1]),
                size,
                depth,
                force,
            };
            let bytes = cmd_render(&path, &opts)?;
            emit(out.as_deref(), &bytes)
        }
        Command::Version => {
            let info = serde_json::json!({
                "name": "ifslab",
                "version": env!("CARGO_PKG_VERSION"),
                "parallel": ifslab::par::is_parallel(),
                "rng": "SplitMix64",
            });
            emit(None, &to_json_bytes(&info))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
