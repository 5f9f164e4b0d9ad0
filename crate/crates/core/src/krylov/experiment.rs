use super::{gmres, pcg, IluPreconditioner, KrylovResult};
use crate::error::Result;
use crate::factor::factor_serial;
use crate::ordering::rcm_order;
use crate::pipeline::{IluConfig, IluPlan};
use crate::pool::WorkerPool;
use crate::sparse::{CsrMatrix, Permutation};
use crate::symbolic::{assemble_factors, ilu0_pattern, iluk_pattern};
use crate::trisolve::SolvePath;

/// An ordering under test. With `level_set` the level permutation is
/// applied on top of `perm`.
#[derive(Debug, Clone)]
pub struct NamedOrdering {
    pub name: String,
    pub perm: Permutation,
    pub level_set: bool,
}

impl NamedOrdering {
    pub fn natural(n: usize) -> Self {
        Self {
            name: "NAT".into(),
            perm: Permutation::identity(n),
            level_set: false,
        }
    }

    pub fn rcm(a: &CsrMatrix) -> Self {
        Self {
            name: "RCM".into(),
            perm: rcm_order(a.pattern()),
            level_set: false,
        }
    }

    /// `LS-<name>` variant of an ordering.
    pub fn level_set(self) -> Self {
        Self {
            name: format!("LS-{}", self.name),
            level_set: true,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrylovMethod {
    Pcg,
    Gmres { restart: usize },
}

impl KrylovMethod {
    /// CG for symmetric matrices, GMRES(50) otherwise.
    pub fn for_matrix(a: &CsrMatrix) -> Self {
        if a.is_symmetric() {
            Self::Pcg
        } else {
            Self::Gmres { restart: 50 }
        }
    }

    pub fn run(
        self,
        a: &CsrMatrix,
        b: &[f64],
        precond: Option<&dyn super::Preconditioner>,
        tol: f64,
        maxit: usize,
    ) -> Result<KrylovResult> {
        match self {
            Self::Pcg => pcg(a, b, precond, tol, maxit),
            Self::Gmres { restart } => gmres(a, b, precond, restart, tol, maxit),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub ordering: String,
    pub iterations: Option<usize>,
    pub converged: bool,
    /// Why the ordering failed (factorization or solver error).
    pub error: Option<String>,
}

/// Iteration counts of ILU-preconditioned Krylov solves under each
/// ordering. The factorization keeps every level in the upper stage and
/// runs serially; only the ordering changes between rows of the table.
pub fn iteration_experiment(
    a: &CsrMatrix,
    b: &[f64],
    orderings: &[NamedOrdering],
    config: &IluConfig,
    method: KrylovMethod,
    tol: f64,
    maxit: usize,
) -> Vec<IterationRecord> {
    let pool = WorkerPool::serial();
    orderings
        .iter()
        .map(|o| {
            let run = || -> Result<KrylovResult> {
                let factors = if o.level_set {
                    let cfg = IluConfig {
                        lower: None,
                        ..config.clone()
                    };
                    let mut f = IluPlan::build(a.pattern(), &o.perm, &cfg, 1)?.prepare(a, &pool)?;
                    f.factor_serial()?;
                    f.into_factors()
                } else {
                    let ap = a.pattern().permute_symmetric(&o.perm)?;
                    let sym = if config.k == 0 {
                        ilu0_pattern(&ap)?
                    } else {
                        iluk_pattern(&ap, config.k)?.0
                    };
                    let mut f =
                        assemble_factors(a, &sym, &o.perm, config.drop_tol, config.milu, &pool)?;
                    factor_serial(&mut f)?;
                    f
                };
                let path = SolvePath::Serial;
                let m = IluPreconditioner {
                    pool: &pool,
                    factors: &factors,
                    path: &path,
                };
                method.run(a, b, Some(&m), tol, maxit)
            };
            match run() {
                Ok(r) => IterationRecord {
                    ordering: o.name.clone(),
                    iterations: Some(r.iterations),
                    converged: r.converged,
                    error: None,
                },
                Err(e) => IterationRecord {
                    ordering: o.name.clone(),
                    iterations: None,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_takes_one_iteration_everywhere() {
        let a = CsrMatrix::identity(20);
        let b = vec![1.0; 20];
        let ords = vec![
            NamedOrdering::natural(20),
            NamedOrdering::rcm(&a),
            NamedOrdering::rcm(&a).level_set(),
        ];
        let rows = iteration_experiment(
            &a,
            &b,
            &ords,
            &IluConfig::default(),
            KrylovMethod::Pcg,
            1e-6,
            100,
        );
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].ordering, "LS-RCM");
        for r in rows {
            assert_eq!((r.iterations, r.converged), (Some(1), true));
        }
    }
}
