use super::sync::{build_sync_schedule, run_p2p, Sweep, SyncSchedule};
use super::StageLayout;
use crate::error::{Error, Result};
use crate::pool::{balanced_chunks, FirstError, WorkerPool};
use crate::symbolic::IluFactors;

/// Even-rows distribution of the lower stage: contiguous row chunks of
/// balanced nonzero count, one per worker, and an optional point-to-point
/// schedule for the corner.
#[derive(Debug, Clone)]
pub struct ErLayout {
    nu: usize,
    n: usize,
    bounds: Vec<usize>,
    corner: Option<SyncSchedule>,
}

impl ErLayout {
    #[inline]
    pub fn nu(&self) -> usize {
        self.nu
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn nthreads(&self) -> usize {
        self.bounds.len() - 1
    }

    /// Absolute row bounds of the per-worker chunks.
    #[inline]
    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    #[inline]
    pub fn parallel_corner(&self) -> bool {
        self.corner.is_some()
    }
}

/// Chunks the lower-stage rows over `nthreads` workers. The corner is
/// factored in parallel only when requested and it has more than
/// `4 * nthreads` rows.
pub fn build_er(
    f: &IluFactors,
    layout: &StageLayout,
    nthreads: usize,
    parallel_corner: bool,
) -> Result<ErLayout> {
    if nthreads < 1 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    if f.n() != layout.n() {
        return Err(Error::DimensionMismatch {
            expected: layout.n(),
            got: f.n(),
        });
    }
    let (nu, n) = (layout.nu(), layout.n());
    let pat = f.pattern();
    let weights: Vec<usize> = (nu..n).map(|r| pat.row_nnz(r)).collect();
    let bounds = balanced_chunks(&weights, nthreads)
        .into_iter()
        .map(|b| b + nu)
        .collect();

    let corner = if parallel_corner && n - nu > 4 * nthreads {
        let mut level_of = vec![0usize; n];
        let mut levels: Vec<Vec<usize>> = Vec::new();
        for r in nu..n {
            let lvl = pat
                .row(r)
                .iter()
                .filter(|&&c| c >= nu && c < r)
                .map(|&c| level_of[c] + 1)
                .max()
                .unwrap_or(0);
            level_of[r] = lvl;
            if levels.len() <= lvl {
                levels.resize_with(lvl + 1, Vec::new);
            }
            levels[lvl].push(r);
        }
        Some(build_sync_schedule(&levels, pat, Sweep::Forward, nthreads)?)
    } else {
        None
    };
    Ok(ErLayout {
        nu,
        n,
        bounds,
        corner,
    })
}

/// Even-rows lower stage: every worker eliminates the upper-stage columns
/// of its rows, then after a single join the corner is factored.
///
/// The upper stage must already be factored.
pub fn factor_er(pool: &WorkerPool, f: &mut IluFactors, er: &ErLayout) -> Result<()> {
    if er.n != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: er.n,
        });
    }
    if er.nthreads() != pool.nthreads() {
        return Err(Error::Config(format!(
            "layout built for {} workers, pool has {}",
            er.nthreads(),
            pool.nthreads()
        )));
    }
    let nu = er.nu;
    let k = f.kernel_parts();
    pool.broadcast(|w| {
        for r in er.bounds[w]..er.bounds[w + 1] {
            // SAFETY: rows of a chunk belong to one worker; pivots come from
            // the finished upper stage.
            unsafe { k.eliminate(r, k.row_start[r], k.first_at_or_after(r, nu)) };
        }
    });
    let corner_row = |r: usize| unsafe {
        k.eliminate(r, k.first_at_or_after(r, nu), k.diag_pos[r]);
        k.pivot_is_zero(r)
    };
    match &er.corner {
        None => {
            for r in nu..er.n {
                if corner_row(r) {
                    return Err(Error::ZeroPivot(r));
                }
            }
        }
        Some(sched) => {
            let bad = FirstError::new();
            run_p2p(pool, sched, |r| {
                if corner_row(r) {
                    bad.record(r);
                }
            })?;
            if let Some(r) = bad.get() {
                return Err(Error::ZeroPivot(r));
            }
        }
    }
    Ok(())
}
