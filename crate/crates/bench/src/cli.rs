use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use levilu::factor::{LowerMethod, SelectThresholds};
use levilu::gen::MatrixKind;
use levilu::ordering::{LevelSource, PartitionConfig};
use levilu::IluConfig;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Natural,
    Rcm,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelsOnArg {
    #[value(name = "A")]
    A,
    #[value(name = "AplusAT")]
    AplusAT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LowerArg {
    Auto,
    Sr,
    Er,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    None,
    Pcg,
    Gmres,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Poisson2d,
    Poisson3d,
    Convdiff2d,
    Tridiag,
}

impl From<GenKind> for MatrixKind {
    fn from(k: GenKind) -> Self {
        match k {
            GenKind::Poisson2d => MatrixKind::Poisson2d,
            GenKind::Poisson3d => MatrixKind::Poisson3d,
            GenKind::Convdiff2d => MatrixKind::ConvDiff2d,
            GenKind::Tridiag => MatrixKind::Tridiag,
        }
    }
}

/// Times the incomplete LU pipeline (ordering, levels, assembly,
/// factorization, triangular solves, Krylov solve) across worker counts.
#[derive(Debug, Clone, Parser)]
#[command(name = "levilu-bench", version)]
pub struct Args {
    /// Matrix Market input file.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub matrix: Option<PathBuf>,
    /// Generated test matrix instead of a file.
    #[arg(long, value_enum, requires = "size")]
    pub gen: Option<GenKind>,
    /// Grid side (or order for tridiag) of the generated matrix.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pre-ordering file, one 0-based original index per line (new to old).
    #[arg(long)]
    pub perm: Option<PathBuf>,
    /// Pre-ordering; defaults to `file` when --perm is given.
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    #[arg(long, value_enum, default_value = "AplusAT")]
    pub levels_on: LevelsOnArg,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long)]
    pub milu: bool,
    #[arg(long, value_enum, default_value = "auto")]
    pub lower: LowerArg,
    #[arg(long, default_value_t = PartitionConfig::default().min_level_rows)]
    pub min_level_rows: usize,
    #[arg(long, default_value_t = PartitionConfig::default().density_factor)]
    pub density_factor: f64,
    #[arg(long, default_value_t = 256)]
    pub tile_size: usize,
    /// Automatic choice: even-rows needs this many lower rows per worker.
    #[arg(long, default_value_t = SelectThresholds::default().rows_per_thread)]
    pub er_rows_per_thread: usize,
    /// Automatic choice: even-rows needs max/mean lower row length at most this.
    #[arg(long, default_value_t = SelectThresholds::default().max_imbalance)]
    pub er_max_imbalance: f64,
    /// Factor a large even-rows corner with point-to-point sync.
    #[arg(long)]
    pub parallel_corner: bool,
    /// Comma-separated worker counts; each is a fresh pipeline run.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub threads: Vec<usize>,
    #[arg(long, value_enum, default_value = "none")]
    pub solver: SolverArg,
    #[arg(long, default_value_t = 50)]
    pub restart: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub maxit: usize,
    /// Repetitions of every timed region; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub report: ReportFormat,
    /// Report destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 5 when the Krylov solve does not converge.
    #[arg(long)]
    pub require_convergence: bool,
}

impl Args {
    pub fn order(&self) -> OrderArg {
        self.order.unwrap_or(if self.perm.is_some() {
            OrderArg::File
        } else {
            OrderArg::Natural
        })
    }

    /// Worker counts in ascending order; a 1-worker run is always included
    /// since speedups are relative to it.
    pub fn worker_counts(&self) -> Vec<usize> {
        let mut t = self.threads.clone();
        t.push(1);
        t.sort_unstable();
        t.dedup();
        t
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Usage(m.into()));
        if self.threads.contains(&0) {
            return bad("--threads entries must be at least 1");
        }
        if self.repeats == 0 {
            return bad("--repeats must be at least 1");
        }
        if (self.order() == OrderArg::File) != self.perm.is_some() {
            return bad("--order file and --perm go together");
        }
        if self.lower == LowerArg::Sr && self.levels_on == LevelsOnArg::A {
            return bad("--lower sr needs --levels-on AplusAT");
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad("--tau must be finite and non-negative");
        }
        if !(self.er_max_imbalance >= 1.0) {
            return bad("--er-max-imbalance must be at least 1");
        }
        if !(self.tol > 0.0) {
            return bad("--tol must be positive");
        }
        if self.solver == SolverArg::Gmres && self.restart == 0 {
            return bad("--restart must be at least 1");
        }
        if self.gen.is_some() && self.size.is_none_or(|s| s < 2) {
            return bad("--size must be at least 2");
        }
        Ok(())
    }

    pub fn ilu_config(&self) -> IluConfig {
        IluConfig {
            k: self.k,
            drop_tol: self.tau,
            milu: self.milu,
            level_source: match self.levels_on {
                LevelsOnArg::A => LevelSource::LowerA,
                LevelsOnArg::AplusAT => LevelSource::LowerAPlusAT,
            },
            partition: PartitionConfig {
                min_level_rows: self.min_level_rows,
                density_factor: self.density_factor,
                ..Default::default()
            },
            lower: match self.lower {
                LowerArg::Auto => Some(LowerMethod::Auto),
                LowerArg::Sr => Some(LowerMethod::Sr),
                LowerArg::Er => Some(LowerMethod::Er),
                LowerArg::None => None,
            },
            tile_size: self.tile_size,
            thresholds: SelectThresholds {
                rows_per_thread: self.er_rows_per_thread,
                max_imbalance: self.er_max_imbalance,
            },
            parallel_corner: self.parallel_corner,
        }
    }
}
