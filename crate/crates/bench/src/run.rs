use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use levilu::factor::LowerMethod;
use levilu::gen::generate_test_matrix;
use levilu::krylov::{gmres, pcg, IluPreconditioner, KrylovResult};
use levilu::ordering::{level_stats, rcm_order};
use levilu::sparse::read_matrix_market_file;
use levilu::trisolve::Sweep;
use levilu::{CsrMatrix, Factorization, IluPlan, Permutation, SolveKind, WorkerPool};
use sha2::{Digest, Sha256};

use crate::cli::{Args, LevelsOnArg, LowerArg, OrderArg, SolverArg};
use crate::report::*;
use crate::BenchError;

/// Shortest time reported, so speedups stay finite.
const MIN_TIME: f64 = 1e-9;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Median over `repeats` runs of `f`, and the last run's value.
fn timed<T>(
    repeats: usize,
    mut f: impl FnMut() -> Result<T, BenchError>,
) -> Result<(f64, T), BenchError> {
    let mut times = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats {
        let t = Instant::now();
        last = Some(f()?);
        times.push(t.elapsed().as_secs_f64().max(MIN_TIME));
    }
    Ok((median(times), last.expect("at least one repeat")))
}

/// Hex SHA-256 of the bit patterns of `values`.
pub fn digest(values: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(v.to_bits().to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn load_matrix(args: &Args) -> Result<(CsrMatrix, String), BenchError> {
    match (&args.matrix, args.gen) {
        (Some(path), _) => Ok((
            read_matrix_market_file(path).map_err(BenchError::Input)?,
            path.display().to_string(),
        )),
        (None, Some(kind)) => {
            let size = args.size.unwrap_or(0);
            let a =
                generate_test_matrix(kind.into(), size, args.seed).map_err(BenchError::Input)?;
            let kind: levilu::gen::MatrixKind = kind.into();
            Ok((a, format!("{}({size},seed={})", kind.name(), args.seed)))
        }
        (None, None) => Err(BenchError::Usage(
            "one of --matrix or --gen is required".into(),
        )),
    }
}

fn pre_order(args: &Args, a: &CsrMatrix) -> Result<Permutation, BenchError> {
    match args.order() {
        OrderArg::Natural => Ok(Permutation::identity(a.n())),
        OrderArg::Rcm => Ok(rcm_order(a.pattern())),
        OrderArg::File => {
            let path = args
                .perm
                .as_ref()
                .ok_or_else(|| BenchError::Usage("--order file needs --perm".into()))?;
            let file = File::open(path).map_err(|e| BenchError::Input(e.into()))?;
            let p = Permutation::read(BufReader::new(file)).map_err(BenchError::Input)?;
            if p.len() != a.n() {
                return Err(BenchError::Input(levilu::Error::DimensionMismatch {
                    expected: a.n(),
                    got: p.len(),
                }));
            }
            Ok(p)
        }
    }
}

fn method_name(m: Option<LowerMethod>) -> &'static str {
    match m {
        None => "none",
        Some(LowerMethod::Sr) => "sr",
        Some(_) => "er",
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Run {
    record: RunRecord,
    factorization: Factorization,
}

fn run_workers(
    args: &Args,
    a: &CsrMatrix,
    pre: &Permutation,
    p: usize,
) -> Result<(Run, IluPlan), BenchError> {
    let config = args.ilu_config();
    let pool = WorkerPool::new(p)?;
    let mut setup = Vec::with_capacity(args.repeats);
    let mut factor = Vec::with_capacity(args.repeats);
    let mut last = None;
    for _ in 0..args.repeats {
        let t = Instant::now();
        let plan = IluPlan::build(a.pattern(), pre, &config, p)?;
        let mut fac = plan.prepare(a, &pool)?;
        setup.push(t.elapsed().as_secs_f64().max(MIN_TIME));
        let t = Instant::now();
        fac.factor(&pool)?;
        factor.push(t.elapsed().as_secs_f64().max(MIN_TIME));
        last = Some((plan, fac));
    }
    let (plan, fac) = last.expect("at least one repeat");

    let f = fac.factors();
    let b = vec![1.0; a.n()];
    let mut solve = [0.0; 4];
    for (slot, kind) in solve.iter_mut().zip(SolveKind::ALL) {
        let path = fac.solve_path(kind, p)?;
        *slot = timed(args.repeats, || {
            let y = path.solve(&pool, f, &b, Sweep::Forward)?;
            Ok(path.solve(&pool, f, &y, Sweep::Backward)?)
        })?
        .0;
    }
    let record = RunRecord {
        threads: p,
        lower_method: method_name(plan.method()).into(),
        setup_s: median(setup),
        factor_s: median(factor),
        factor_speedup: 1.0,
        solve_s: SolveTimes {
            serial: solve[0],
            csr_ls: solve[1],
            ls: solve[2],
            ls_lower: solve[3],
        },
        solve_speedup: SolveSpeedups {
            csr_ls: 1.0,
            ls: 1.0,
            ls_lower: 1.0,
        },
        digest: digest(f.values()),
    };
    Ok((
        Run {
            record,
            factorization: fac,
        },
        plan,
    ))
}

fn run_krylov(
    args: &Args,
    a: &CsrMatrix,
    fac: &Factorization,
    p: usize,
) -> Result<Option<KrylovInfo>, BenchError> {
    let method = match args.solver {
        SolverArg::None => return Ok(None),
        SolverArg::Pcg => "pcg",
        SolverArg::Gmres => "gmres",
    };
    let pool = WorkerPool::new(p)?;
    let path = fac.solve_path(SolveKind::LsLower, p)?;
    let m = IluPreconditioner {
        pool: &pool,
        factors: fac.factors(),
        path: &path,
    };
    let ones = vec![1.0; a.n()];
    let b = a.spmv(&ones)?;
    let solve = || -> levilu::Result<KrylovResult> {
        match args.solver {
            SolverArg::Gmres => gmres(a, &b, Some(&m), args.restart, args.tol, args.maxit),
            _ => pcg(a, &b, Some(&m), args.tol, args.maxit),
        }
    };
    let mut times = Vec::with_capacity(args.repeats);
    let mut outcome = None;
    for _ in 0..args.repeats {
        let t = Instant::now();
        outcome = Some(solve());
        times.push(t.elapsed().as_secs_f64().max(MIN_TIME));
    }
    let info = match outcome.expect("at least one repeat") {
        Ok(r) => {
            let ax = a.spmv(&r.x)?;
            let res: Vec<f64> = ax.iter().zip(&b).map(|(p, q)| q - p).collect();
            let err: Vec<f64> = r.x.iter().map(|x| x - 1.0).collect();
            KrylovInfo {
                method: method.into(),
                threads: p,
                iterations: r.iterations,
                converged: r.converged,
                relative_residual: norm(&res) / norm(&b).max(f64::MIN_POSITIVE),
                relative_error: norm(&err) / norm(&ones).max(f64::MIN_POSITIVE),
                solve_s: median(times),
                error: None,
            }
        }
        Err(e @ levilu::Error::Breakdown { .. }) => KrylovInfo {
            method: method.into(),
            threads: p,
            iterations: 0,
            converged: false,
            relative_residual: 1.0,
            relative_error: 1.0,
            solve_s: median(times),
            error: Some(e.to_string()),
        },
        Err(e) => return Err(e.into()),
    };
    Ok(Some(info))
}

/// Runs the whole pipeline once per worker count and assembles the report.
/// Digest mismatches are recorded in the report, not returned as errors.
pub fn run_pipeline(args: &Args) -> Result<BenchReport, BenchError> {
    args.validate()?;
    let (a, source) = load_matrix(args)?;
    let (order_s, pre) = timed(args.repeats, || pre_order(args, &a))?;

    let counts = args.worker_counts();
    let mut runs = Vec::with_capacity(counts.len());
    let mut first_plan = None;
    for &p in &counts {
        let (run, plan) = run_workers(args, &a, &pre, p)?;
        first_plan.get_or_insert(plan);
        runs.push(run);
    }
    let plan = first_plan.expect("worker counts include 1");

    let base_factor = runs[0].record.factor_s;
    let base_solve = runs[0].record.solve_s.csr_ls;
    for (i, run) in runs.iter_mut().enumerate() {
        let r = &mut run.record;
        if i > 0 {
            r.factor_speedup = base_factor / r.factor_s;
        }
        r.solve_speedup = SolveSpeedups {
            csr_ls: base_solve / r.solve_s.csr_ls,
            ls: base_solve / r.solve_s.ls,
            ls_lower: base_solve / r.solve_s.ls_lower,
        };
    }
    let best = |f: fn(&SolveTimes) -> f64| {
        base_solve
            / runs
                .iter()
                .map(|r| f(&r.record.solve_s))
                .fold(f64::INFINITY, f64::min)
    };
    let max_solve_speedup = SolveSpeedups {
        csr_ls: best(|s| s.csr_ls),
        ls: best(|s| s.ls),
        ls_lower: best(|s| s.ls_lower),
    };

    let last = runs.last().expect("at least one run");
    let krylov = run_krylov(args, &a, &last.factorization, last.record.threads)?;

    let digest = runs[0].record.digest.clone();
    let digests_match = runs.iter().all(|r| r.record.digest == digest);

    let stats = level_stats(plan.schedule());
    let part = plan.partition();
    let report = BenchReport {
        schema_version: SCHEMA_VERSION,
        matrix: MatrixInfo {
            source,
            n: a.n(),
            nnz: a.nnz(),
            mean_row_nnz: a.mean_row_nnz(),
            symmetric: a.is_symmetric(),
        },
        ordering: OrderingInfo {
            pre: match args.order() {
                OrderArg::Natural => "natural",
                OrderArg::Rcm => "rcm",
                OrderArg::File => "file",
            }
            .into(),
            perm_file: args.perm.as_ref().map(|p| p.display().to_string()),
            levels_on: match args.levels_on {
                LevelsOnArg::A => "A",
                LevelsOnArg::AplusAT => "AplusAT",
            }
            .into(),
        },
        levels: LevelInfo {
            num_levels: stats.num_levels,
            min: stats.min_rows,
            max: stats.max_rows,
            median: stats.median_rows,
            rows_excluded: part.lower_rows().len(),
        },
        partition: PartitionInfo {
            cut_level: part.cut_level(),
            upper_rows: part.num_upper_rows(),
            lower_rows: part.lower_rows().len(),
            factor_nnz: plan.pattern().nnz(),
        },
        config: ConfigEcho {
            k: args.k,
            tau: args.tau,
            milu: args.milu,
            lower: match args.lower {
                LowerArg::Auto => "auto",
                LowerArg::Sr => "sr",
                LowerArg::Er => "er",
                LowerArg::None => "none",
            }
            .into(),
            min_level_rows: args.min_level_rows,
            density_factor: args.density_factor,
            tile_size: args.tile_size,
            er_rows_per_thread: args.er_rows_per_thread,
            er_max_imbalance: args.er_max_imbalance,
            parallel_corner: args.parallel_corner,
            threads: counts,
            solver: match args.solver {
                SolverArg::None => "none",
                SolverArg::Pcg => "pcg",
                SolverArg::Gmres => "gmres",
            }
            .into(),
            restart: args.restart,
            tol: args.tol,
            maxit: args.maxit,
            repeats: args.repeats,
            stopping_rule: "relative residual ||b - A x|| / ||b||".into(),
        },
        order_s,
        runs: runs.into_iter().map(|r| r.record).collect(),
        max_solve_speedup,
        krylov,
        determinism: Determinism {
            digests_match,
            digest,
        },
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_hashes_bit_patterns() {
        assert_eq!(
            digest(&[]),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_ne!(digest(&[0.0]), digest(&[-0.0]));
    }

    #[test]
    fn median_takes_the_middle() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![5.0]), 5.0);
    }
}
