//! Symbolic patterns (ILU(0), ILU(k)) and assembly of the combined L/U storage.

mod factors;
mod iluk;

pub(crate) use factors::KernelParts;
pub use factors::{assemble_factors, IluFactors};
pub use iluk::{ilu0_pattern, iluk_pattern, FillLevelTable};
