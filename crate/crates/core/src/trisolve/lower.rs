use super::{check_rhs, gather, solve_row, Sweep};
use crate::error::{Error, Result};
use crate::factor::{
    build_sync_schedule, run_p2p, ErLayout, StageLayout, SyncSchedule, TileLayout,
};
use crate::pool::{SharedMut, WorkerPool};
use crate::symbolic::IluFactors;

/// How lower-stage rows gather their upper-stage columns.
#[derive(Debug, Clone)]
pub enum LowerSolve {
    /// No lower stage.
    None,
    /// Segmented-rows tiles, chained per row in column order.
    Tiles(TileLayout),
    /// Even-rows chunks, one per worker.
    Chunks(ErLayout),
}

/// Two-stage solve plan: point-to-point schedules for the upper-stage rows
/// and the lower-stage gather method.
#[derive(Debug, Clone)]
pub struct LsLowerPlan {
    nu: usize,
    n: usize,
    forward: SyncSchedule,
    backward: SyncSchedule,
    lower: LowerSolve,
}

impl LsLowerPlan {
    #[inline]
    pub fn nu(&self) -> usize {
        self.nu
    }

    #[inline]
    pub fn lower(&self) -> &LowerSolve {
        &self.lower
    }
}

/// The forward schedule reuses the factorization levels of the upper
/// stage; the backward schedule levels the upper stage's strict upper
/// pattern bottom-up, ignoring columns in the lower stage.
pub fn build_ls_lower_plan(
    f: &IluFactors,
    layout: &StageLayout,
    lower: LowerSolve,
    nthreads: usize,
) -> Result<LsLowerPlan> {
    let (nu, n) = (layout.nu(), layout.n());
    if f.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.n(),
        });
    }
    match &lower {
        LowerSolve::None if nu != n => {
            return Err(Error::Config(
                "lower stage present but no lower solve method given".into(),
            ));
        }
        LowerSolve::Tiles(t) if t.n() != n || t.nu() != nu => {
            return Err(Error::Config(
                "tile layout does not match the stage layout".into(),
            ));
        }
        LowerSolve::Chunks(e) if e.n() != n || e.nu() != nu || e.nthreads() != nthreads => {
            return Err(Error::Config(
                "even-rows layout does not match the stage layout".into(),
            ));
        }
        _ => {}
    }
    let pat = f.pattern();
    let forward = build_sync_schedule(&layout.levels(), pat, Sweep::Forward, nthreads)?;

    let mut level_of = vec![0usize; nu];
    let mut levels: Vec<Vec<usize>> = Vec::new();
    for r in (0..nu).rev() {
        let lvl = pat
            .row(r)
            .iter()
            .filter(|&&c| c > r && c < nu)
            .map(|&c| level_of[c] + 1)
            .max()
            .unwrap_or(0);
        level_of[r] = lvl;
        if levels.len() <= lvl {
            levels.resize_with(lvl + 1, Vec::new);
        }
        levels[lvl].push(r);
    }
    for l in &mut levels {
        l.reverse();
    }
    let backward = build_sync_schedule(&levels, pat, Sweep::Backward, nthreads)?;
    Ok(LsLowerPlan {
        nu,
        n,
        forward,
        backward,
        lower,
    })
}

/// Forward: upper rows point-to-point, then the lower rows gather their
/// upper-stage columns (tiles or chunks) and finish serially through the
/// corner. Backward: the corner serially bottom-up, then the upper rows
/// point-to-point.
pub fn solve_ls_lower(
    pool: &WorkerPool,
    f: &IluFactors,
    plan: &LsLowerPlan,
    b: &[f64],
    which: Sweep,
) -> Result<Vec<f64>> {
    check_rhs(f, b, which)?;
    if plan.n != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: plan.n,
        });
    }
    let (nu, n) = (plan.nu, plan.n);
    let mut x = b.to_vec();
    let xs = SharedMut::new(&mut x);
    let pat = f.pattern();
    let split = |r: usize| pat.row_range(r).start + pat.row(r).partition_point(|&c| c < nu);
    match which {
        Sweep::Forward => {
            // SAFETY (all blocks below): each row is written by one task at a
            // time, and the rows it reads are complete.
            run_p2p(pool, &plan.forward, |r| unsafe {
                solve_row(f, &xs, r, which)
            })?;
            match &plan.lower {
                LowerSolve::None => {}
                LowerSolve::Tiles(t) => t.solve_graph.run(pool, |tile| {
                    for s in t.segments(tile) {
                        unsafe { gather(f, &xs, s.row, s.start..s.end) };
                    }
                }),
                LowerSolve::Chunks(e) => {
                    if e.nthreads() != pool.nthreads() {
                        return Err(Error::Config(
                            "even-rows layout built for a different worker count".into(),
                        ));
                    }
                    pool.broadcast(|w| {
                        for r in e.bounds()[w]..e.bounds()[w + 1] {
                            unsafe { gather(f, &xs, r, pat.row_range(r).start..split(r)) };
                        }
                    })
                }
            }
            for r in nu..n {
                unsafe { gather(f, &xs, r, split(r)..f.diag_pos()[r]) };
            }
        }
        Sweep::Backward => {
            for r in (nu..n).rev() {
                unsafe { solve_row(f, &xs, r, which) };
            }
            run_p2p(pool, &plan.backward, |r| unsafe {
                solve_row(f, &xs, r, which)
            })?;
        }
    }
    Ok(x)
}
