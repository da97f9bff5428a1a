//! Error type shared by every fallible operation in the crate.

use thiserror::Error;

/// Errors reported by instance validation, LP solving, combinatorial
/// subroutines, and the exact reference solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller supplied an instance or argument that violates a
    /// documented precondition (non-metric costs, zero visit counts,
    /// depot indices out of range, and so on).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The linear relaxation has no feasible point, which for the
    /// supported problem classes means the instance itself is malformed
    /// (for example more salesmen than the vertex budget allows).
    #[error("relaxation infeasible: {0}")]
    InfeasibleRelaxation(String),

    /// An iterative solver failed to make progress within its safety
    /// bounds. This indicates a numerical pathology rather than a
    /// property of the instance.
    #[error("solver stalled: {0}")]
    SolverStall(String),

    /// An exact reference computation was requested on an instance
    /// larger than its enumeration budget.
    #[error("exact solver budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A combinatorial structure with the requested side constraints
    /// does not exist (for example no spanning tree with the required
    /// degree at the root).
    #[error("no feasible structure: {0}")]
    InfeasibleStructure(String),

    /// An internal invariant failed. Always a bug in this crate.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
