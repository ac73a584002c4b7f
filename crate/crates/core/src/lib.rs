//! Reconstruction of spike-train signals `F(x) = sum_j a_j delta(x - x_j)`
//! from their first `2d` moments, together with the geometry of how
//! measurement errors are amplified when nodes cluster.
//!
//! * [`prony`]: moments, Vieta and Hankel maps, root finding and the full
//!   solver.
//! * [`solvability`]: rank stratification and hyperbolicity tests.
//! * [`varieties`]: Prony varieties and curves, curve tracing, collision
//!   diagnostics and curve-restricted estimation.
//! * [`error_geometry`]: model-space normalization, error-set sampling and
//!   worst-case error scans.
//! * [`applications`]: exponential fitting, Gauss quadrature and binary
//!   Waring decompositions.

pub mod applications;
pub mod error;
pub mod error_geometry;
pub mod prony;
pub mod solvability;
pub mod varieties;

pub use error::{PronyError, Result};
pub use prony::{
    hankel_map, moments, polynomial_roots, prony_solve, prony_solve_with, vieta, MomentVector,
    MonicPolynomial, PronySolution, SolveOutcome, SolverConfig, SpikeSignal,
};
