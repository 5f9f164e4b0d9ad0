//! Generated test matrices: stencil operators and random diagonally
//! dominant systems.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// 5-point Laplacian on an `m x m` grid.
    Poisson2d,
    /// 27-point Laplacian on an `m x m x m` grid.
    Poisson3d,
    /// Upwinded convection-diffusion on an `m x m` grid.
    ConvDiff2d,
    /// `tridiag(-1, 2, -1)` of order `m`.
    Tridiag,
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poisson2d" => Ok(Self::Poisson2d),
            "poisson3d" => Ok(Self::Poisson3d),
            "convdiff2d" => Ok(Self::ConvDiff2d),
            "tridiag" => Ok(Self::Tridiag),
            _ => Err(Error::Config(format!("unknown matrix kind {s:?}"))),
        }
    }
}

impl MatrixKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Poisson2d => "poisson2d",
            Self::Poisson3d => "poisson3d",
            Self::ConvDiff2d => "convdiff2d",
            Self::Tridiag => "tridiag",
        }
    }
}

/// Builds a stencil matrix of grid size `size` (at least 2). Only the
/// convection-diffusion kind uses `seed`, to pick the flow direction.
pub fn generate_test_matrix(kind: MatrixKind, size: usize, seed: u64) -> Result<CsrMatrix> {
    if size < 2 {
        return Err(Error::Config(format!(
            "grid size must be at least 2, got {size}"
        )));
    }
    Ok(match kind {
        MatrixKind::Poisson2d => poisson2d(size),
        MatrixKind::Poisson3d => poisson3d(size),
        MatrixKind::ConvDiff2d => convdiff2d(size, seed),
        MatrixKind::Tridiag => tridiag(size),
    })
}

pub fn tridiag(n: usize) -> CsrMatrix {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            t.push((i, i - 1, -1.0));
        }
        t.push((i, i, 2.0));
        if i + 1 < n {
            t.push((i, i + 1, -1.0));
        }
    }
    CsrMatrix::from_triplets(n, &t).expect("indices in range")
}

/// Row-major grid numbering `x * m + y`.
pub fn poisson2d(m: usize) -> CsrMatrix {
    let n = m * m;
    let mut t = Vec::with_capacity(5 * n);
    for x in 0..m {
        for y in 0..m {
            let i = x * m + y;
            t.push((i, i, 4.0));
            if x > 0 {
                t.push((i, i - m, -1.0));
            }
            if x + 1 < m {
                t.push((i, i + m, -1.0));
            }
            if y > 0 {
                t.push((i, i - 1, -1.0));
            }
            if y + 1 < m {
                t.push((i, i + 1, -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(n, &t).expect("indices in range")
}

/// Diagonal 26, every existing neighbour in the 3x3x3 box -1.
pub fn poisson3d(m: usize) -> CsrMatrix {
    let n = m * m * m;
    let idx = |x: usize, y: usize, z: usize| (x * m + y) * m + z;
    let mut t = Vec::with_capacity(27 * n);
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                let i = idx(x, y, z);
                for dx in -1i64..=1 {
                    for dy in -1i64..=1 {
                        for dz in -1i64..=1 {
                            let (nx, ny, nz) = (x as i64 + dx, y as i64 + dy, z as i64 + dz);
                            if [nx, ny, nz].iter().any(|&c| c < 0 || c >= m as i64) {
                                continue;
                            }
                            let j = idx(nx as usize, ny as usize, nz as usize);
                            t.push((i, j, if i == j { 26.0 } else { -1.0 }));
                        }
                    }
                }
            }
        }
    }
    CsrMatrix::from_triplets(n, &t).expect("indices in range")
}

/// `-lap(u) + b . grad(u)` with first-order upwinding, scaled by `h^2`.
/// The flow speed is 20 and its direction is drawn from `seed`, so the
/// matrix is unsymmetric and weakly diagonally dominant.
pub fn convdiff2d(m: usize, seed: u64) -> CsrMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (bx, by) = (20.0 * theta.cos(), 20.0 * theta.sin());
    let h = 1.0 / (m as f64 + 1.0);
    let n = m * m;
    let mut t = Vec::with_capacity(5 * n);
    for x in 0..m {
        for y in 0..m {
            let i = x * m + y;
            t.push((i, i, 4.0 + h * (bx.abs() + by.abs())));
            if x > 0 {
                t.push((i, i - m, -1.0 - h * bx.max(0.0)));
            }
            if x + 1 < m {
                t.push((i, i + m, -1.0 - h * (-bx).max(0.0)));
            }
            if y > 0 {
                t.push((i, i - 1, -1.0 - h * by.max(0.0)));
            }
            if y + 1 < m {
                t.push((i, i + 1, -1.0 - h * (-by).max(0.0)));
            }
        }
    }
    CsrMatrix::from_triplets(n, &t).expect("indices in range")
}

/// Random strictly diagonally dominant matrix of order `n`. Each row gets
/// about `per_row` off-diagonal entries at uniform random columns, so the
/// pattern is unsymmetric; the diagonal exceeds the row's absolute sum.
pub fn random_diag_dominant(n: usize, per_row: usize, seed: u64) -> CsrMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::with_capacity(n * (per_row + 1));
    for i in 0..n {
        let mut sum = 0.0;
        if n > 1 {
            for _ in 0..per_row {
                let j = rng.gen_range(0..n);
                if j == i {
                    continue;
                }
                let v: f64 = rng.gen_range(-1.0..1.0);
                sum += v.abs();
                t.push((i, j, v));
            }
        }
        t.push((i, i, sum + rng.gen_range(0.5..1.5)));
    }
    CsrMatrix::from_triplets(n, &t).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiag_stencil() {
        let a = tridiag(4);
        assert_eq!(
            a.to_dense(),
            vec![
                vec![2.0, -1.0, 0.0, 0.0],
                vec![-1.0, 2.0, -1.0, 0.0],
                vec![0.0, -1.0, 2.0, -1.0],
                vec![0.0, 0.0, -1.0, 2.0]
            ]
        );
    }

    #[test]
    fn poisson2d_counts_and_symmetry() {
        for m in 2..8 {
            let a = poisson2d(m);
            assert_eq!(a.nnz(), 5 * m * m - 4 * m);
            assert!(a.is_symmetric());
        }
        assert_eq!(poisson2d(3).n(), 9);
        assert_eq!(poisson2d(3).nnz(), 33);
    }

    #[test]
    fn poisson3d_counts() {
        // interior point has 27 entries; total is (3m - 2)^3
        for m in 2..5 {
            let a = poisson3d(m);
            assert_eq!(a.nnz(), (3 * m - 2).pow(3));
            assert!(a.is_symmetric());
        }
    }

    #[test]
    fn convdiff_is_seeded_and_dominant() {
        let a = convdiff2d(6, 7);
        assert_eq!(a, convdiff2d(6, 7));
        assert!(!a.is_symmetric());
        for i in 0..a.n() {
            let (cols, vals) = a.row(i);
            let off: f64 = cols
                .iter()
                .zip(vals)
                .filter(|(&c, _)| c != i)
                .map(|(_, v)| v.abs())
                .sum();
            assert!(a.get(i, i).unwrap() >= off - 1e-12);
        }
        assert!(generate_test_matrix(MatrixKind::Tridiag, 1, 0).is_err());
    }

    #[test]
    fn random_dominant() {
        let a = random_diag_dominant(50, 4, 3);
        assert_eq!(a, random_diag_dominant(50, 4, 3));
        for i in 0..50 {
            let (cols, vals) = a.row(i);
            let off: f64 = cols
                .iter()
                .zip(vals)
                .filter(|(&c, _)| c != i)
                .map(|(_, v)| v.abs())
                .sum();
            assert!(a.get(i, i).unwrap() > off);
        }
    }
}
