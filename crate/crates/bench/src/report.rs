use std::io::Write;

use serde::{Deserialize, Serialize};

/// Bumped whenever a field changes meaning or is removed.
pub const SCHEMA_VERSION: u32 = 1;

/// JSON schema of [`BenchReport`].
pub const REPORT_SCHEMA: &str = include_str!("../../../docs/report.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub matrix: MatrixInfo,
    pub ordering: OrderingInfo,
    pub levels: LevelInfo,
    pub partition: PartitionInfo,
    pub config: ConfigEcho,
    /// Median wall time of the pre-ordering, seconds.
    pub order_s: f64,
    /// One entry per worker count, ascending; the first has 1 worker.
    pub runs: Vec<RunRecord>,
    /// Best solve time over all worker counts against the 1-worker CSR-LS
    /// time.
    pub max_solve_speedup: SolveSpeedups,
    pub krylov: Option<KrylovInfo>,
    pub determinism: Determinism,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixInfo {
    pub source: String,
    pub n: usize,
    pub nnz: usize,
    pub mean_row_nnz: f64,
    pub symmetric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingInfo {
    /// `natural`, `rcm` or `file`.
    pub pre: String,
    pub perm_file: Option<String>,
    /// `A` or `AplusAT`.
    pub levels_on: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelInfo {
    pub num_levels: usize,
    pub min: usize,
    pub max: usize,
    pub median: usize,
    /// Rows moved to the lower stage.
    pub rows_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionInfo {
    pub cut_level: usize,
    pub upper_rows: usize,
    pub lower_rows: usize,
    pub factor_nnz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub k: usize,
    pub tau: f64,
    pub milu: bool,
    pub lower: String,
    pub min_level_rows: usize,
    pub density_factor: f64,
    pub tile_size: usize,
    pub er_rows_per_thread: usize,
    pub er_max_imbalance: f64,
    pub parallel_corner: bool,
    pub threads: Vec<usize>,
    pub solver: String,
    pub restart: usize,
    pub tol: f64,
    pub maxit: usize,
    pub repeats: usize,
    pub stopping_rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub threads: usize,
    /// Lower-stage method used at this worker count: `none`, `sr` or `er`.
    pub lower_method: String,
    /// Levels, pattern, assembly and schedules.
    pub setup_s: f64,
    pub factor_s: f64,
    /// Factor time at 1 worker over factor time here.
    pub factor_speedup: f64,
    /// Forward plus backward sweep per path.
    pub solve_s: SolveTimes,
    /// 1-worker CSR-LS solve time over each path's time here.
    pub solve_speedup: SolveSpeedups,
    /// SHA-256 of the factor values.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTimes {
    pub serial: f64,
    pub csr_ls: f64,
    pub ls: f64,
    pub ls_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSpeedups {
    pub csr_ls: f64,
    pub ls: f64,
    pub ls_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrylovInfo {
    /// `pcg` or `gmres`.
    pub method: String,
    pub threads: usize,
    pub iterations: usize,
    pub converged: bool,
    pub relative_residual: f64,
    /// `||x - 1|| / ||1||` for the right-hand side `A 1`.
    pub relative_error: f64,
    pub solve_s: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Determinism {
    pub digests_match: bool,
    pub digest: String,
}

/// One CSV line per run; report-level fields are repeated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub source: String,
    pub n: usize,
    pub nnz: usize,
    pub num_levels: usize,
    pub rows_excluded: usize,
    pub threads: usize,
    pub lower_method: String,
    pub setup_s: f64,
    pub factor_s: f64,
    pub factor_speedup: f64,
    pub solve_serial_s: f64,
    pub solve_csr_ls_s: f64,
    pub solve_ls_s: f64,
    pub solve_ls_lower_s: f64,
    pub speedup_csr_ls: f64,
    pub speedup_ls: f64,
    pub speedup_ls_lower: f64,
    pub digest: String,
    pub krylov_iterations: Option<usize>,
    pub krylov_converged: Option<bool>,
}

impl BenchReport {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.runs
            .iter()
            .map(|r| CsvRow {
                source: self.matrix.source.clone(),
                n: self.matrix.n,
                nnz: self.matrix.nnz,
                num_levels: self.levels.num_levels,
                rows_excluded: self.levels.rows_excluded,
                threads: r.threads,
                lower_method: r.lower_method.clone(),
                setup_s: r.setup_s,
                factor_s: r.factor_s,
                factor_speedup: r.factor_speedup,
                solve_serial_s: r.solve_s.serial,
                solve_csr_ls_s: r.solve_s.csr_ls,
                solve_ls_s: r.solve_s.ls,
                solve_ls_lower_s: r.solve_s.ls_lower,
                speedup_csr_ls: r.solve_speedup.csr_ls,
                speedup_ls: r.solve_speedup.ls,
                speedup_ls_lower: r.solve_speedup.ls_lower,
                digest: r.digest.clone(),
                krylov_iterations: self.krylov.as_ref().map(|k| k.iterations),
                krylov_converged: self.krylov.as_ref().map(|k| k.converged),
            })
            .collect()
    }

    pub fn write_json<W: Write>(&self, w: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(w, self)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in self.csv_rows() {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}
