use std::sync::Barrier;

use super::{check_rhs, solve_row, Sweep};
use crate::error::{Error, Result};
use crate::factor::{build_sync_schedule, run_p2p, SyncSchedule};
use crate::ordering::{compute_levels, compute_levels_upper, LevelSchedule, LevelSource};
use crate::pool::{SharedMut, WorkerPool};
use crate::symbolic::IluFactors;

/// Level schedules of `L` and `U` for the barrier baseline.
#[derive(Debug, Clone)]
pub struct CsrLsPlan {
    forward: LevelSchedule,
    backward: LevelSchedule,
}

impl CsrLsPlan {
    pub fn schedule(&self, which: Sweep) -> &LevelSchedule {
        match which {
            Sweep::Forward => &self.forward,
            Sweep::Backward => &self.backward,
        }
    }
}

pub fn build_csrls_plan(f: &IluFactors) -> CsrLsPlan {
    CsrLsPlan {
        forward: compute_levels(f.pattern(), LevelSource::LowerA),
        backward: compute_levels_upper(f.pattern()),
    }
}

/// Level-synchronous solve: rows of a level are dealt round-robin to the
/// workers, and all workers meet at a barrier after every level.
pub fn solve_baseline_csrls(
    pool: &WorkerPool,
    f: &IluFactors,
    sched: &LevelSchedule,
    b: &[f64],
    which: Sweep,
) -> Result<Vec<f64>> {
    check_rhs(f, b, which)?;
    if sched.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: sched.n(),
        });
    }
    if (sched.source() == LevelSource::Upper) != (which == Sweep::Backward) {
        return Err(Error::Config(
            "level schedule does not match the sweep direction".into(),
        ));
    }
    let mut x = b.to_vec();
    let xs = SharedMut::new(&mut x);
    let p = pool.nthreads();
    let barrier = Barrier::new(p);
    pool.broadcast(|w| {
        for level in sched.levels() {
            for &r in level.iter().skip(w).step_by(p) {
                // SAFETY: rows of a level are independent and dealt to one
                // worker each; earlier levels are behind a barrier.
                unsafe { solve_row(f, &xs, r, which) };
            }
            barrier.wait();
        }
    });
    Ok(x)
}

/// Point-to-point schedules of `L` and `U`.
#[derive(Debug, Clone)]
pub struct LsPlan {
    forward: SyncSchedule,
    backward: SyncSchedule,
}

impl LsPlan {
    pub fn schedule(&self, which: Sweep) -> &SyncSchedule {
        match which {
            Sweep::Forward => &self.forward,
            Sweep::Backward => &self.backward,
        }
    }
}

/// Forward levels come from the strict lower pattern of the factors, the
/// backward levels from the strict upper pattern swept bottom-up.
pub fn build_ls_plan(f: &IluFactors, nthreads: usize) -> Result<LsPlan> {
    let pat = f.pattern();
    let fl = compute_levels(pat, LevelSource::LowerA);
    let bl = compute_levels_upper(pat);
    Ok(LsPlan {
        forward: build_sync_schedule(fl.levels(), pat, Sweep::Forward, nthreads)?,
        backward: build_sync_schedule(bl.levels(), pat, Sweep::Backward, nthreads)?,
    })
}

/// Point-to-point solve without barriers.
pub fn solve_ls(
    pool: &WorkerPool,
    f: &IluFactors,
    sched: &SyncSchedule,
    b: &[f64],
    which: Sweep,
) -> Result<Vec<f64>> {
    check_rhs(f, b, which)?;
    if sched.n() != f.n() || sched.num_scheduled() != f.n() {
        return Err(Error::Config(
            "schedule does not cover every row of the factors".into(),
        ));
    }
    let mut x = b.to_vec();
    let xs = SharedMut::new(&mut x);
    // SAFETY: one writer per row, dependencies observed through the waits.
    run_p2p(pool, sched, |r| unsafe { solve_row(f, &xs, r, which) })?;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factor_serial;
    use crate::sparse::Permutation;
    use crate::symbolic::assemble_factors;
    use crate::trisolve::solve_serial;

    #[test]
    fn paths_agree_on_poisson() {
        let a = crate::gen::poisson2d(12);
        let mut f = assemble_factors(
            &a,
            a.pattern(),
            &Permutation::identity(a.n()),
            0.0,
            false,
            &WorkerPool::serial(),
        )
        .unwrap();
        factor_serial(&mut f).unwrap();
        let b: Vec<f64> = (0..a.n()).map(|i| (i as f64).sin()).collect();
        let csr = build_csrls_plan(&f);
        for which in [Sweep::Forward, Sweep::Backward] {
            let want = solve_serial(&f, &b, which).unwrap();
            for p in [1, 3] {
                let pool = WorkerPool::new(p).unwrap();
                let ls = build_ls_plan(&f, p).unwrap();
                assert_eq!(
                    solve_baseline_csrls(&pool, &f, csr.schedule(which), &b, which).unwrap(),
                    want
                );
                assert_eq!(
                    solve_ls(&pool, &f, ls.schedule(which), &b, which).unwrap(),
                    want
                );
            }
        }
        let pool = WorkerPool::serial();
        assert!(
            solve_baseline_csrls(&pool, &f, csr.schedule(Sweep::Forward), &b, Sweep::Backward)
                .is_err()
        );
    }
}
