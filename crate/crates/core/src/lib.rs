//! Level-scheduled parallel incomplete LU factorization.
//!
//! Rows are grouped into dependency levels and permuted so each level is
//! contiguous. Levels that are large enough are factored with point-to-point
//! synchronization between workers; the trailing rows form a lower stage
//! handled by the segmented-rows (tiled task graph) or even-rows (chunked)
//! method. Triangular solves follow the same structure, and the factors
//! serve as preconditioners for CG and GMRES.

pub mod error;
pub mod factor;
pub mod gen;
pub mod krylov;
pub mod ordering;
pub mod pipeline;
pub mod pool;
pub mod sparse;
pub mod symbolic;
pub mod trisolve;

pub use error::{Error, Result};
pub use pipeline::{factorize, Factorization, IluConfig, IluPlan, SolveKind};
pub use pool::WorkerPool;
pub use sparse::{CsrMatrix, Permutation, SparsityPattern};
