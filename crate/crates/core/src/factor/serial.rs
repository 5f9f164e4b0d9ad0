use crate::error::{Error, Result};
use crate::symbolic::IluFactors;

/// Up-looking incomplete LU on the stored pattern, one row at a time.
///
/// For each row, stored columns left of the diagonal are eliminated in
/// ascending order: the entry is divided by the pivot, then
/// `a[r, j] -= l * u[c, j]` is applied to stored positions only. With a
/// drop tolerance, an L entry below `tau * rownorm` is zeroed and its
/// updates skipped; with MILU, skipped and dropped mass goes to the
/// diagonal.
pub fn factor_serial(f: &mut IluFactors) -> Result<()> {
    let n = f.n();
    let k = f.kernel_parts();
    for r in 0..n {
        // SAFETY: single thread, rows processed in dependency order.
        unsafe {
            k.eliminate(r, k.row_start[r], k.diag_pos[r]);
            if k.pivot_is_zero(r) {
                return Err(Error::ZeroPivot(r));
            }
        }
    }
    Ok(())
}
