use super::sync::{build_sync_schedule, run_p2p, Sweep, SyncSchedule};
use super::StageLayout;
use crate::error::{Error, Result};
use crate::pool::{FirstError, WorkerPool};
use crate::sparse::SparsityPattern;
use crate::symbolic::IluFactors;

/// Point-to-point schedule for the upper-stage rows of `pattern`.
pub fn build_upper_schedule(
    layout: &StageLayout,
    pattern: &SparsityPattern,
    nthreads: usize,
) -> Result<SyncSchedule> {
    if pattern.n() != layout.n() {
        return Err(Error::DimensionMismatch {
            expected: layout.n(),
            got: pattern.n(),
        });
    }
    build_sync_schedule(&layout.levels(), pattern, Sweep::Forward, nthreads)
}

/// Factors every scheduled row with the serial row kernel under
/// point-to-point synchronization. Rows outside the schedule are left
/// untouched. Zero pivots are reported (smallest row) once all workers
/// have finished.
pub fn factor_parallel_upper(
    pool: &WorkerPool,
    f: &mut IluFactors,
    sched: &SyncSchedule,
) -> Result<()> {
    if sched.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: sched.n(),
        });
    }
    let k = f.kernel_parts();
    let bad = FirstError::new();
    run_p2p(pool, sched, |r| {
        // SAFETY: row r is owned by this worker; its dependencies were
        // observed complete through the schedule's waits.
        unsafe {
            k.eliminate(r, k.row_start[r], k.diag_pos[r]);
            if k.pivot_is_zero(r) {
                bad.record(r);
            }
        }
    })?;
    match bad.get() {
        Some(r) => Err(Error::ZeroPivot(r)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factor_serial;
    use crate::gen::poisson2d;
    use crate::ordering::build_level_permutation;
    use crate::ordering::{levels_for_pattern, LevelSource, StagePartition};
    use crate::symbolic::assemble_factors;

    #[test]
    fn poisson_matches_serial_bitwise() {
        let a = poisson2d(16);
        let s = levels_for_pattern(a.pattern(), LevelSource::LowerA);
        let part = StagePartition::all_upper(&s);
        let perm = build_level_permutation(&part);
        let b = a.permute_symmetric(&perm).unwrap();
        let layout = StageLayout::from_partition(&part);
        let serial = {
            let mut f = assemble_factors(&a, b.pattern(), &perm, 0.0, false, &WorkerPool::serial())
                .unwrap();
            factor_serial(&mut f).unwrap();
            f
        };
        for p in [1, 2, 4] {
            let pool = WorkerPool::new(p).unwrap();
            let mut f = assemble_factors(&a, b.pattern(), &perm, 0.0, false, &pool).unwrap();
            let sched = build_upper_schedule(&layout, f.pattern(), p).unwrap();
            factor_parallel_upper(&pool, &mut f, &sched).unwrap();
            assert_eq!(f.values(), serial.values());
        }
    }

    #[test]
    fn zero_pivot_reported() {
        let a = crate::sparse::CsrMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let layout = StageLayout::from_level_sizes(&[1, 1], 2, LevelSource::LowerA);
        let pool = WorkerPool::new(2).unwrap();
        let mut f = assemble_factors(
            &a,
            a.pattern(),
            &crate::sparse::Permutation::identity(2),
            0.0,
            false,
            &pool,
        )
        .unwrap();
        let sched = build_upper_schedule(&layout, f.pattern(), 2).unwrap();
        assert_eq!(
            factor_parallel_upper(&pool, &mut f, &sched).unwrap_err(),
            Error::ZeroPivot(1)
        );
    }
}
