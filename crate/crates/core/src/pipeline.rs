//! End-to-end driver: pre-ordering, symbolic pattern, levels, stage split,
//! assembly, factorization and solve plans.

use crate::error::{Error, Result};
use crate::factor::{
    build_er, build_tiles, build_upper_schedule, factor_er, factor_parallel_upper, factor_serial,
    factor_sr, row_imbalance, select_lower_method_with, LowerMethod, SelectThresholds, StageLayout,
    SyncSchedule,
};
use crate::ordering::{
    build_level_permutation, levels_for_pattern, partition_stages, LevelSchedule, LevelSource,
    PartitionConfig, StagePartition,
};
use crate::pool::WorkerPool;
use crate::sparse::{CsrMatrix, Permutation, SparsityPattern};
use crate::symbolic::{assemble_factors, ilu0_pattern, iluk_pattern, IluFactors};
use crate::trisolve::{
    build_csrls_plan, build_ls_lower_plan, build_ls_plan, LowerSolve, SolvePath,
};

#[derive(Debug, Clone, PartialEq)]
pub struct IluConfig {
    /// Level of fill.
    pub k: usize,
    /// Relative drop tolerance for L entries; 0 disables dropping.
    pub drop_tol: f64,
    pub milu: bool,
    pub level_source: LevelSource,
    pub partition: PartitionConfig,
    /// `None` keeps every level in the upper stage.
    pub lower: Option<LowerMethod>,
    pub tile_size: usize,
    pub thresholds: SelectThresholds,
    /// Factor the even-rows corner with point-to-point sync when it is
    /// large enough.
    pub parallel_corner: bool,
}

impl Default for IluConfig {
    fn default() -> Self {
        Self {
            k: 0,
            drop_tol: 0.0,
            milu: false,
            level_source: LevelSource::LowerAPlusAT,
            partition: PartitionConfig::default(),
            lower: Some(LowerMethod::Auto),
            tile_size: 256,
            thresholds: SelectThresholds::default(),
            parallel_corner: false,
        }
    }
}

/// Structural decisions for one matrix pattern and worker count.
#[derive(Debug, Clone)]
pub struct IluPlan {
    config: IluConfig,
    nthreads: usize,
    schedule: LevelSchedule,
    partition: StagePartition,
    perm: Permutation,
    pattern: SparsityPattern,
    layout: StageLayout,
    method: Option<LowerMethod>,
}

impl IluPlan {
    /// `pre` is a pre-ordering of `a` (`pre[new] = old`). The symbolic
    /// pattern is computed in the pre-ordering; levels are taken on it and
    /// the level permutation is applied on top.
    pub fn build(
        a: &SparsityPattern,
        pre: &Permutation,
        config: &IluConfig,
        nthreads: usize,
    ) -> Result<Self> {
        if nthreads < 1 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if pre.len() != a.n() {
            return Err(Error::DimensionMismatch {
                expected: a.n(),
                got: pre.len(),
            });
        }
        if config.lower == Some(LowerMethod::Sr) && config.level_source != LevelSource::LowerAPlusAT
        {
            return Err(Error::SrRequiresSymmetrizedLevels);
        }
        if config.level_source == LevelSource::Upper {
            return Err(Error::Config(
                "factorization levels come from lower(A) or lower(A+A^T)".into(),
            ));
        }
        let ap = a.permute_symmetric(pre)?;
        let sym = if config.k == 0 {
            ilu0_pattern(&ap)?
        } else {
            iluk_pattern(&ap, config.k)?.0
        };
        let schedule = levels_for_pattern(&sym, config.level_source);
        let partition = match config.lower {
            None => StagePartition::all_upper(&schedule),
            Some(_) => {
                let row_nnz: Vec<usize> = (0..sym.n()).map(|i| sym.row_nnz(i)).collect();
                partition_stages(&schedule, &row_nnz, config.partition)?
            }
        };
        let lp = build_level_permutation(&partition);
        let perm = lp.then(pre)?;
        let pattern = sym.permute_symmetric(&lp)?;
        let layout = StageLayout::from_partition(&partition);
        let method = if layout.num_lower() == 0 {
            None
        } else {
            match config.lower {
                Some(LowerMethod::Auto) => {
                    let imb = row_imbalance(&pattern, layout.nu()..layout.n());
                    let m = select_lower_method_with(
                        layout.num_lower(),
                        nthreads,
                        imb,
                        &config.thresholds,
                    );
                    // tiles need intra-level independence
                    if m == Some(LowerMethod::Sr)
                        && config.level_source != LevelSource::LowerAPlusAT
                    {
                        Some(LowerMethod::Er)
                    } else {
                        m
                    }
                }
                m => m,
            }
        };
        Ok(Self {
            config: config.clone(),
            nthreads,
            schedule,
            partition,
            perm,
            pattern,
            layout,
            method,
        })
    }

    pub fn config(&self) -> &IluConfig {
        &self.config
    }

    pub fn nthreads(&self) -> usize {
        self.nthreads
    }

    /// Levels of the symbolic pattern in the pre-ordering.
    pub fn schedule(&self) -> &LevelSchedule {
        &self.schedule
    }

    pub fn partition(&self) -> &StagePartition {
        &self.partition
    }

    /// Factor ordering to original ordering.
    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    /// Factor pattern in the factor ordering.
    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    pub fn layout(&self) -> &StageLayout {
        &self.layout
    }

    /// Resolved lower-stage method, `None` without a lower stage.
    pub fn method(&self) -> Option<LowerMethod> {
        self.method
    }

    /// Copies `a` into factor storage and builds the schedules (the setup
    /// phase).
    pub fn prepare(&self, a: &CsrMatrix, pool: &WorkerPool) -> Result<Factorization> {
        if pool.nthreads() != self.nthreads {
            return Err(Error::Config(format!(
                "plan built for {} workers, pool has {}",
                self.nthreads,
                pool.nthreads()
            )));
        }
        let factors = assemble_factors(
            a,
            &self.pattern,
            &self.perm,
            self.config.drop_tol,
            self.config.milu,
            pool,
        )?;
        let upper = build_upper_schedule(&self.layout, factors.pattern(), self.nthreads)?;
        let lower = match self.method {
            None => LowerSolve::None,
            Some(LowerMethod::Sr) => {
                LowerSolve::Tiles(build_tiles(&factors, &self.layout, self.config.tile_size)?)
            }
            Some(_) => LowerSolve::Chunks(build_er(
                &factors,
                &self.layout,
                self.nthreads,
                self.config.parallel_corner,
            )?),
        };
        Ok(Factorization {
            factors,
            layout: self.layout.clone(),
            upper,
            lower,
            factored: false,
        })
    }
}

/// Assembled factors with the schedules needed to factor and solve.
#[derive(Debug, Clone)]
pub struct Factorization {
    factors: IluFactors,
    layout: StageLayout,
    upper: SyncSchedule,
    lower: LowerSolve,
    factored: bool,
}

impl Factorization {
    pub fn factors(&self) -> &IluFactors {
        &self.factors
    }

    pub fn into_factors(self) -> IluFactors {
        self.factors
    }

    pub fn layout(&self) -> &StageLayout {
        &self.layout
    }

    pub fn upper_schedule(&self) -> &SyncSchedule {
        &self.upper
    }

    pub fn lower(&self) -> &LowerSolve {
        &self.lower
    }

    fn start(&mut self) -> Result<()> {
        if self.factored {
            return Err(Error::Config("factors are already factored".into()));
        }
        self.factored = true;
        Ok(())
    }

    /// Two-stage parallel factorization. A zero pivot is reported by its
    /// row in the original ordering.
    pub fn factor(&mut self, pool: &WorkerPool) -> Result<()> {
        self.start()?;
        let res = factor_parallel_upper(pool, &mut self.factors, &self.upper).and_then(|_| {
            match &self.lower {
                LowerSolve::None => Ok(()),
                LowerSolve::Tiles(t) => factor_sr(pool, &mut self.factors, t),
                LowerSolve::Chunks(e) => factor_er(pool, &mut self.factors, e),
            }
        });
        res.map_err(|e| self.to_original(e))
    }

    /// Reference factorization on the calling thread.
    pub fn factor_serial(&mut self) -> Result<()> {
        self.start()?;
        factor_serial(&mut self.factors).map_err(|e| self.to_original(e))
    }

    fn to_original(&self, e: Error) -> Error {
        match e {
            Error::ZeroPivot(r) => Error::ZeroPivot(self.factors.perm().perm()[r]),
            e => e,
        }
    }

    /// Builds the plan for a solve path. `kind` is one of `serial`,
    /// `csr-ls`, `ls`, `ls-lower`.
    pub fn solve_path(&self, kind: SolveKind, nthreads: usize) -> Result<SolvePath> {
        Ok(match kind {
            SolveKind::Serial => SolvePath::Serial,
            SolveKind::CsrLs => SolvePath::CsrLs(build_csrls_plan(&self.factors)),
            SolveKind::Ls => SolvePath::Ls(build_ls_plan(&self.factors, nthreads)?),
            SolveKind::LsLower => SolvePath::LsLower(build_ls_lower_plan(
                &self.factors,
                &self.layout,
                self.lower.clone(),
                nthreads,
            )?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveKind {
    Serial,
    CsrLs,
    Ls,
    LsLower,
}

impl SolveKind {
    pub const ALL: [SolveKind; 4] = [
        SolveKind::Serial,
        SolveKind::CsrLs,
        SolveKind::Ls,
        SolveKind::LsLower,
    ];
}

/// Convenience: plan, assemble and factor `a` in the level ordering of
/// `pre` with `pool`.
pub fn factorize(
    a: &CsrMatrix,
    pre: &Permutation,
    config: &IluConfig,
    pool: &WorkerPool,
) -> Result<Factorization> {
    let plan = IluPlan::build(a.pattern(), pre, config, pool.nthreads())?;
    let mut f = plan.prepare(a, pool)?;
    f.factor(pool)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{poisson2d, random_diag_dominant};
    use crate::trisolve::Sweep;

    fn serial_values(a: &CsrMatrix, plan: &IluPlan) -> Vec<f64> {
        let mut f = plan
            .prepare(a, &WorkerPool::new(plan.nthreads()).unwrap())
            .unwrap();
        f.factor_serial().unwrap();
        f.factors().values().to_vec()
    }

    #[test]
    fn both_lower_methods_match_serial() {
        let a = random_diag_dominant(200, 4, 11);
        let variants = [
            (0, 0.0, false),
            (0, 0.05, true),
            (1, 0.02, false),
            (1, 0.0, true),
        ];
        for (method, (k, drop_tol, milu)) in [LowerMethod::Sr, LowerMethod::Er]
            .into_iter()
            .flat_map(|m| variants.into_iter().map(move |v| (m, v)))
        {
            let config = IluConfig {
                k,
                drop_tol,
                milu,
                lower: Some(method),
                partition: PartitionConfig {
                    min_level_rows: 40,
                    ..Default::default()
                },
                tile_size: 7,
                ..Default::default()
            };
            for p in [1, 2, 3] {
                let pool = WorkerPool::new(p).unwrap();
                let plan =
                    IluPlan::build(a.pattern(), &Permutation::identity(200), &config, p).unwrap();
                assert!(plan.layout().num_lower() > 0, "expected a lower stage");
                assert_eq!(plan.method(), Some(method));
                let want = serial_values(&a, &plan);
                let mut f = plan.prepare(&a, &pool).unwrap();
                f.factor(&pool).unwrap();
                assert_eq!(f.factors().values(), &want[..], "{method:?} p={p}");
                let b: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).cos()).collect();
                for which in [Sweep::Forward, Sweep::Backward] {
                    let want = crate::trisolve::solve_serial(f.factors(), &b, which).unwrap();
                    for kind in SolveKind::ALL {
                        let path = f.solve_path(kind, p).unwrap();
                        assert_eq!(
                            path.solve(&pool, f.factors(), &b, which).unwrap(),
                            want,
                            "{kind:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn level_permutation_is_applied_on_top_of_pre_order() {
        let a = poisson2d(6);
        let pre = crate::ordering::rcm_order(a.pattern());
        let plan = IluPlan::build(a.pattern(), &pre, &IluConfig::default(), 1).unwrap();
        let b = a.permute_symmetric(plan.perm()).unwrap();
        assert_eq!(plan.pattern(), b.pattern());
    }

    #[test]
    fn refactor_is_rejected_and_zero_pivot_maps_back() {
        let a = poisson2d(4);
        let pool = WorkerPool::serial();
        let mut f =
            factorize(&a, &Permutation::identity(16), &IluConfig::default(), &pool).unwrap();
        assert!(f.factor(&pool).is_err());

        let s = CsrMatrix::from_dense(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
        ]);
        let pre = Permutation::new(vec![2, 1, 0]).unwrap();
        let err = factorize(
            &s,
            &pre,
            &IluConfig {
                lower: None,
                ..Default::default()
            },
            &pool,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ZeroPivot(0) | Error::ZeroPivot(2)));
    }

    #[test]
    fn sr_needs_symmetrized_levels() {
        let a = poisson2d(4);
        let config = IluConfig {
            lower: Some(LowerMethod::Sr),
            level_source: LevelSource::LowerA,
            ..Default::default()
        };
        assert_eq!(
            IluPlan::build(a.pattern(), &Permutation::identity(16), &config, 1).unwrap_err(),
            Error::SrRequiresSymmetrizedLevels
        );
    }
}
