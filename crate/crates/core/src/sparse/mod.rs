//! CSR storage, Matrix Market I/O, permutations and pattern manipulation.

mod csr;
mod mm;
mod pattern;
mod perm;

pub use csr::CsrMatrix;
pub use mm::{parse_matrix_market, write_matrix_market};
pub use pattern::SparsityPattern;
pub use perm::Permutation;

/// Opens and parses a Matrix Market file.
pub fn read_matrix_market_file(path: impl AsRef<std::path::Path>) -> crate::Result<CsrMatrix> {
    let f = std::fs::File::open(path)?;
    parse_matrix_market(std::io::BufReader::new(f))
}
