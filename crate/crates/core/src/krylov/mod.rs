//! Preconditioned conjugate gradients and restarted GMRES.
//!
//! Both stop when the relative residual `||b - A x|| / ||b||` reaches
//! `tol`. Iterations count matrix-vector products with `A` (CG) or Arnoldi
//! steps (GMRES); the start vector is zero.

mod experiment;

pub use experiment::{iteration_experiment, IterationRecord, KrylovMethod, NamedOrdering};

use crate::error::{Error, Result};
use crate::pool::WorkerPool;
use crate::sparse::CsrMatrix;
use crate::symbolic::IluFactors;
use crate::trisolve::{apply_preconditioner, SolvePath};

/// Approximate inverse `z = M^{-1} r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()>;
}

/// `M = I`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(r);
        Ok(())
    }
}

/// `M = diag(d)`.
#[derive(Debug, Clone)]
pub struct DiagonalPreconditioner {
    pub diag: Vec<f64>,
}

impl Preconditioner for DiagonalPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.diag) {
            *zi = ri / di;
        }
        Ok(())
    }
}

/// Incomplete LU factors applied through one of the solve paths.
pub struct IluPreconditioner<'a> {
    pub pool: &'a WorkerPool,
    pub factors: &'a IluFactors,
    pub path: &'a SolvePath,
}

impl Preconditioner for IluPreconditioner<'_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(&apply_preconditioner(
            self.pool,
            self.factors,
            self.path,
            r,
        )?);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual norm before the first and after every iteration.
    pub residual_history: Vec<f64>,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_system(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<()> {
    if b.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Preconditioned conjugate gradients for symmetric positive definite `A`.
/// A non-positive curvature `p^T A p` or `r^T z` is reported as a breakdown.
pub fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    precond: Option<&dyn Preconditioner>,
    tol: f64,
    maxit: usize,
) -> Result<KrylovResult> {
    check_system(a, b, tol)?;
    let n = a.n();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(KrylovResult {
            x,
            iterations: 0,
            converged: true,
            residual_history: vec![0.0],
        });
    }
    let ident = IdentityPreconditioner;
    let m = precond.unwrap_or(&ident);
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut history = vec![1.0];
    if 1.0 <= tol {
        return Ok(KrylovResult {
            x,
            iterations: 0,
            converged: true,
            residual_history: history,
        });
    }
    m.apply(&r, &mut z)?;
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=maxit {
        if !(rz > 0.0) {
            return Err(Error::Breakdown {
                method: "pcg",
                iteration: it,
            });
        }
        a.spmv_into(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Breakdown {
                method: "pcg",
                iteration: it,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = norm(&r) / bnorm;
        history.push(rel);
        if rel <= tol {
            return Ok(KrylovResult {
                x,
                iterations: it,
                converged: true,
                residual_history: history,
            });
        }
        m.apply(&r, &mut z)?;
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Ok(KrylovResult {
        x,
        iterations: maxit,
        converged: false,
        residual_history: history,
    })
}

/// Right-preconditioned restarted GMRES: solves `A M^{-1} u = b` and
/// returns `x = M^{-1} u`. Arnoldi uses modified Gram-Schmidt and the
/// least-squares problem is reduced with Givens rotations. Each cycle ends
/// with a true residual check.
pub fn gmres(
    a: &CsrMatrix,
    b: &[f64],
    precond: Option<&dyn Preconditioner>,
    restart: usize,
    tol: f64,
    maxit: usize,
) -> Result<KrylovResult> {
    check_system(a, b, tol)?;
    if restart == 0 {
        return Err(Error::Config("restart length must be at least 1".into()));
    }
    let n = a.n();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(KrylovResult {
            x,
            iterations: 0,
            converged: true,
            residual_history: vec![0.0],
        });
    }
    let ident = IdentityPreconditioner;
    let m = precond.unwrap_or(&ident);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];
    loop {
        a.spmv_into(&x, &mut r)?;
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let beta = norm(&r);
        let rel = beta / bnorm;
        // the true residual replaces the cycle's last estimate
        match history.last_mut() {
            Some(last) => *last = rel,
            None => history.push(rel),
        }
        if rel <= tol {
            return Ok(KrylovResult {
                x,
                iterations,
                converged: true,
                residual_history: history,
            });
        }
        if iterations >= maxit {
            return Ok(KrylovResult {
                x,
                iterations,
                converged: false,
                residual_history: history,
            });
        }

        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|ri| ri / beta).collect()];
        let mut zs: Vec<Vec<f64>> = Vec::with_capacity(restart);
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(restart);
        let mut cs: Vec<f64> = Vec::with_capacity(restart);
        let mut sn: Vec<f64> = Vec::with_capacity(restart);
        let mut g = vec![beta];
        for j in 0..restart {
            let mut z = vec![0.0; n];
            m.apply(&v[j], &mut z)?;
            a.spmv_into(&z, &mut w)?;
            zs.push(z);
            let mut col = vec![0.0; j + 2];
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(&w, vi);
                col[i] = hij;
                for k in 0..n {
                    w[k] -= hij * vi[k];
                }
            }
            let hnext = norm(&w);
            col[j + 1] = hnext;
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let d = col[j].hypot(col[j + 1]);
            let (c, s) = if d == 0.0 {
                (1.0, 0.0)
            } else {
                (col[j] / d, col[j + 1] / d)
            };
            col[j] = d;
            col[j + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g.push(-s * g[j]);
            g[j] *= c;
            h.push(col);
            iterations += 1;
            let est = g[j + 1].abs() / bnorm;
            history.push(est);
            let happy = hnext <= f64::EPSILON * beta;
            if est <= tol || happy || iterations >= maxit {
                break;
            }
            v.push(w.iter().map(|wi| wi / hnext).collect());
        }
        // back substitution on the triangular H
        let k = h.len();
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for (jj, yj) in y.iter().enumerate().skip(i + 1) {
                s -= h[jj][i] * yj;
            }
            if h[i][i] == 0.0 {
                return Err(Error::Breakdown {
                    method: "gmres",
                    iteration: iterations,
                });
            }
            y[i] = s / h[i][i];
        }
        for (yj, zj) in y.iter().zip(&zs) {
            for i in 0..n {
                x[i] += yj * zj[i];
            }
        }
    }
}
