use thiserror::Error;

/// Errors shared by the matrix, symmetry, solver, and application layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input matrix is not square ({rows}x{cols})")]
    NonSquareInput { rows: usize, cols: usize },

    #[error("eigendecomposition did not converge for a {dim}x{dim} matrix")]
    EigSolverFailure { dim: usize },

    #[error("matrix is singular within tolerance (min eigenvalue {min_eigenvalue:e})")]
    SingularMatrix { min_eigenvalue: f64 },

    #[error("eigenvalue {value:e} lies below the clamp floor -{clamp:e}")]
    NegativeEigenvalue { value: f64, clamp: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unitary {index} deviates from U†U = I by {deviation:e}")]
    NotUnitary { index: usize, deviation: f64 },

    #[error("explicit unitary list is empty")]
    EmptyGroup,

    #[error("explicit unitary list has {len} elements; the cap is {cap}")]
    GroupTooLarge { len: usize, cap: usize },

    #[error("invalid eigenvalue bracket alpha={alpha:e}, beta={beta:e}")]
    InvalidBracket { alpha: f64, beta: f64 },

    #[error("matrix has rank {rank}, expected rank one")]
    NotRankOne { rank: usize },

    #[error(
        "input has rank {rank} < dim {dim} and no depolarization epsilon was set; \
         pass a positive epsilon to regularize"
    )]
    RankDeficientInput { rank: usize, dim: usize },

    #[error(
        "objective increased by {increase:e} at iteration {iteration}; \
         the linear algebra has degraded past the monotonicity tolerance"
    )]
    NumericalInstability { iteration: usize, increase: f64 },

    #[error("matrix has zero trace; depolarization is undefined")]
    ZeroTrace,

    #[error("depolarization epsilon {eps} is outside (0, 1)")]
    InvalidEpsilon { eps: f64 },

    #[error("trace must be 1 within {tol:e} (got {trace})")]
    NotUnitTrace { trace: f64, tol: f64 },

    #[error("weights must be nonnegative and sum to 1 (sum = {sum})")]
    InvalidWeights { sum: f64 },

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("state is not maximally correlated (off-subspace mass {mass:e})")]
    NotMaximallyCorrelated { mass: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
