//! Independent dense and graph oracles shared by the integration tests.
#![allow(dead_code)]

use levilu::factor::SyncSchedule;
use levilu::symbolic::IluFactors;
use levilu::{CsrMatrix, SparsityPattern};

pub type Dense = Vec<Vec<f64>>;

/// Doolittle LU without pivoting; zero multipliers are skipped so banded
/// inputs stay cheap. Returns `(L with unit diagonal, U)`.
pub fn dense_lu(a: &Dense) -> (Dense, Dense) {
    let n = a.len();
    let mut u = a.clone();
    let mut l = vec![vec![0.0; n]; n];
    for k in 0..n {
        l[k][k] = 1.0;
        for i in k + 1..n {
            if u[i][k] == 0.0 {
                continue;
            }
            let m = u[i][k] / u[k][k];
            l[i][k] = m;
            u[i][k] = 0.0;
            for j in k + 1..n {
                if u[k][j] != 0.0 {
                    u[i][j] -= m * u[k][j];
                }
            }
        }
    }
    (l, u)
}

/// Solves `L U x = b` with dense factors.
pub fn dense_lu_solve(l: &Dense, u: &Dense, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut y = b.to_vec();
    for i in 0..n {
        for j in 0..i {
            if l[i][j] != 0.0 {
                y[i] -= l[i][j] * y[j];
            }
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            if u[i][j] != 0.0 {
                y[i] -= u[i][j] * y[j];
            }
        }
        y[i] /= u[i][i];
    }
    y
}

/// Dense modified ILU restricted to the pattern of `a`: updates landing
/// outside the pattern are subtracted from the row's diagonal instead.
pub fn dense_milu(a: &Dense) -> (Dense, Dense) {
    let n = a.len();
    let in_pattern: Vec<Vec<bool>> = a
        .iter()
        .map(|r| r.iter().map(|&v| v != 0.0).collect())
        .collect();
    let mut w = a.clone();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        l[i][i] = 1.0;
        for k in 0..i {
            if !in_pattern[i][k] {
                continue;
            }
            let m = w[i][k] / w[k][k];
            l[i][k] = m;
            w[i][k] = 0.0;
            for j in k + 1..n {
                if w[k][j] == 0.0 || !in_pattern[k][j] {
                    continue;
                }
                if in_pattern[i][j] {
                    w[i][j] -= m * w[k][j];
                } else {
                    w[i][i] -= m * w[k][j];
                }
            }
        }
    }
    let mut u = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            u[i][j] = w[i][j];
        }
    }
    (l, u)
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

pub fn row_sums(a: &Dense) -> Vec<f64> {
    a.iter().map(|r| r.iter().sum()).collect()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let den = b.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// `L U` of combined factors, densely.
pub fn lu_product(f: &IluFactors) -> Dense {
    matmul(&f.l_dense(), &f.u_dense())
}

/// Longest-path depth by relaxation to a fixed point.
pub fn depth_by_relaxation(lower: &SparsityPattern) -> Vec<usize> {
    let n = lower.n();
    let mut d = vec![0usize; n];
    loop {
        let mut changed = false;
        for r in 0..n {
            for &c in lower.row(r) {
                if c < r && d[c] + 1 > d[r] {
                    d[r] = d[c] + 1;
                    changed = true;
                }
            }
        }
        if !changed {
            return d;
        }
    }
}

/// Happens-before closure of a schedule: `hb[r]` holds every row that
/// completes before `r` starts, following program order and retained waits.
pub fn happens_before(s: &SyncSchedule) -> Vec<Vec<bool>> {
    let n = s.n();
    let mut direct: Vec<Vec<usize>> = vec![Vec::new(); n];
    for order in s.program_order() {
        for w in order.windows(2) {
            direct[w[1]].push(w[0]);
        }
    }
    for r in 0..n {
        direct[r].extend_from_slice(s.waits(r));
    }
    let mut hb = vec![vec![false; n]; n];
    for r in 0..n {
        let mut stack = direct[r].clone();
        while let Some(x) = stack.pop() {
            if !hb[r][x] {
                hb[r][x] = true;
                stack.extend_from_slice(&direct[x]);
            }
        }
    }
    hb
}

/// Bitwise equality of two float slices (distinguishes `-0.0` and NaN
/// payloads).
pub fn bitwise_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

pub fn dense(a: &CsrMatrix) -> Dense {
    a.to_dense()
}
