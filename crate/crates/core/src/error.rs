use num_complex::Complex64;
use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, Error)]
pub enum PronyError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `M_d(mu)` is numerically singular; the moment vector sits on a lower
    /// rank stratum and needs the rank-aware solve.
    #[error("Hankel matrix is numerically singular (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})")]
    SingularHankel { sigma_min: f64, sigma_max: f64 },

    #[error("root finder did not converge (residual {residual:e})")]
    NonConvergence { best: Vec<Complex64>, residual: f64 },

    #[error("Vandermonde system is near-degenerate (minimal node gap {min_gap:e})")]
    NearDegenerateVandermonde { min_gap: f64 },

    /// The operation needs `det M_d(mu) != 0`.
    #[error("nonsingular Hankel matrix required, numerical rank is {rank} of {d}")]
    HypothesisViolated { rank: usize, d: usize },

    #[error("cluster is degenerate (all nodes coincide)")]
    DegenerateCluster,

    #[error("no hyperbolic, in-box point on the searched range")]
    NoFeasiblePoint,

    #[error("moments are not solvable over the reals")]
    NotRealSolvable,

    #[error("form is not generic: {0}")]
    GenericityFailure(String),

    #[error("Prony system is unsolvable: {0}")]
    Unsolvable(String),

    #[error("solution has complex nodes")]
    ComplexSolution,
}

pub type Result<T, E = PronyError> = std::result::Result<T, E>;
