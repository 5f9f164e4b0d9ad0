use std::str::FromStr;

use crate::error::Error;
use crate::sparse::SparsityPattern;

/// Lower-stage method. `Auto` is resolved by [`select_lower_method`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerMethod {
    Sr,
    Er,
    Auto,
}

impl FromStr for LowerMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "sr" => Ok(Self::Sr),
            "er" => Ok(Self::Er),
            "auto" => Ok(Self::Auto),
            _ => Err(Error::Config(format!("unknown lower-stage method {s:?}"))),
        }
    }
}

/// Thresholds of the automatic choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectThresholds {
    /// Even-rows needs at least this many lower rows per worker.
    pub rows_per_thread: usize,
    /// Even-rows needs `max row nnz / mean row nnz` at most this.
    pub max_imbalance: f64,
}

impl Default for SelectThresholds {
    fn default() -> Self {
        Self {
            rows_per_thread: 2,
            max_imbalance: 8.0,
        }
    }
}

/// `None` when there is no lower stage; otherwise ER for enough evenly
/// sized rows, SR for few or imbalanced rows.
pub fn select_lower_method(
    lower_rows: usize,
    nthreads: usize,
    imbalance: f64,
) -> Option<LowerMethod> {
    select_lower_method_with(
        lower_rows,
        nthreads,
        imbalance,
        &SelectThresholds::default(),
    )
}

pub fn select_lower_method_with(
    lower_rows: usize,
    nthreads: usize,
    imbalance: f64,
    th: &SelectThresholds,
) -> Option<LowerMethod> {
    if lower_rows == 0 {
        None
    } else if lower_rows >= th.rows_per_thread * nthreads && imbalance <= th.max_imbalance {
        Some(LowerMethod::Er)
    } else {
        Some(LowerMethod::Sr)
    }
}

/// `max / mean` of the row lengths of `rows`; 1 for an empty or all-empty
/// set.
pub fn row_imbalance(p: &SparsityPattern, rows: std::ops::Range<usize>) -> f64 {
    let count = rows.len();
    let (mut total, mut max) = (0usize, 0usize);
    for r in rows {
        total += p.row_nnz(r);
        max = max.max(p.row_nnz(r));
    }
    if total == 0 {
        return 1.0;
    }
    max as f64 / (total as f64 / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule() {
        assert_eq!(select_lower_method(0, 8, 1.0), None);
        assert_eq!(select_lower_method(500, 8, 1.2), Some(LowerMethod::Er));
        assert_eq!(select_lower_method(10, 64, 40.0), Some(LowerMethod::Sr));
        assert_eq!(select_lower_method(500, 8, 9.0), Some(LowerMethod::Sr));
        assert_eq!("ER".parse::<LowerMethod>().unwrap(), LowerMethod::Er);
        assert!("x".parse::<LowerMethod>().is_err());
    }

    #[test]
    fn imbalance() {
        let p =
            SparsityPattern::from_positions(3, [(0, 0), (1, 1), (2, 0), (2, 1), (2, 2), (1, 0)])
                .unwrap();
        assert_eq!(row_imbalance(&p, 0..3), 1.5);
        assert_eq!(row_imbalance(&p, 0..0), 1.0);
    }
}
