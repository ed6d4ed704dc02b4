//! Library side of the `ifslab` command-line tool: input documents, the
//! analysis report, and the command implementations.

pub mod commands;
pub mod document;
pub mod error;
pub mod report;

pub use document::IfsDocument;
pub use error::{CliError, ErrorKind};
pub use report::{analyze, AnalysisReport, AnalyzeOptions, Warning};
