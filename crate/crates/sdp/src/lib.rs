//! Dense interior-point solver for small semidefinite programs.
//!
//! Problems are stated in a single equality standard form over a product of
//! PSD blocks, nonnegative orthants and free scalars (see [`SdpProblem`]).
//! [`solve`] returns the final iterate together with residuals, the duality
//! gap and a status; it never panics on numerical trouble.

mod problem;
mod solver;

pub use problem::{entry, Block, BlockKind, Constraint, Entry, SdpProblem, Sense};
pub use solver::{min_eigenvalue, solve, BlockValue, SolveResult, SolverConfig, Status};

#[derive(Debug, thiserror::Error)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("total PSD dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
}
