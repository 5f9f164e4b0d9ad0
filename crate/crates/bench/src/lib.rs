//! Benchmark harness: runs the incomplete LU pipeline across worker counts
//! and reports per-phase median times, speedups, level statistics and
//! factor digests as JSON or CSV.
//!
//! Exit codes of the binary: 0 success, 1 other failure, 2 bad input or
//! flags, 3 zero pivot, 4 factor digests differ across worker counts, 5 no
//! convergence under `--require-convergence`.

pub mod cli;
pub mod report;
mod run;

pub use cli::Args;
pub use report::{BenchReport, REPORT_SCHEMA, SCHEMA_VERSION};
pub use run::{digest, run_pipeline};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(levilu::Error),
    #[error("pipeline: {0}")]
    Pipeline(levilu::Error),
    #[error("output: {0}")]
    Output(String),
}

impl From<levilu::Error> for BenchError {
    fn from(e: levilu::Error) -> Self {
        match e {
            levilu::Error::SrRequiresSymmetrizedLevels | levilu::Error::Config(_) => {
                BenchError::Usage(e.to_string())
            }
            levilu::Error::Parse { .. }
            | levilu::Error::NotSquare { .. }
            | levilu::Error::InvalidPermutation(_)
            | levilu::Error::MissingDiagonal(_)
            | levilu::Error::Io(_) => BenchError::Input(e),
            e => BenchError::Pipeline(e),
        }
    }
}

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ZERO_PIVOT: i32 = 3;
pub const EXIT_NONDETERMINISTIC: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) | BenchError::Input(_) => EXIT_USAGE,
            BenchError::Pipeline(levilu::Error::ZeroPivot(_)) => EXIT_ZERO_PIVOT,
            BenchError::Pipeline(_) | BenchError::Output(_) => EXIT_FAILURE,
        }
    }
}

/// Exit code for a completed run: the determinism gate first, then
/// convergence when it is required.
pub fn report_exit_code(report: &BenchReport, require_convergence: bool) -> i32 {
    if !report.determinism.digests_match {
        EXIT_NONDETERMINISTIC
    } else if require_convergence && report.krylov.as_ref().is_some_and(|k| !k.converged) {
        EXIT_NOT_CONVERGED
    } else {
        0
    }
}
