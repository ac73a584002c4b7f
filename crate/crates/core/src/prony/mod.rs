//! Core data model and the Prony solution pipeline.
//!
//! The three maps of the solution procedure live here: the Prony map
//! (signal to moments, [`moments`]), the Vieta map (nodes to monic
//! polynomial, [`vieta`]) and the Hankel map (moments to polynomial,
//! [`hankel_map`]). For any signal with distinct nodes and nonzero
//! amplitudes, `hankel_map(prony_map(F)) == vieta(nodes(F))`.

mod hankel;
mod polynomial;
mod roots;
mod signal;
mod solve;

pub use hankel::{
    condition_number, default_rank_tol, extended_hankel_matrix, hankel_from_slice, hankel_map,
    hankel_map_with, hankel_matrix, numerical_rank, pade_numerator, rank_profile,
    singular_values, HankelSolution, RankProfile,
};
pub(crate) use hankel::solve_hankel;
pub use polynomial::{vieta, MonicPolynomial};
pub use roots::{polynomial_roots, ComplexRootSet};
pub use signal::{moments, MomentVector, SpikeSignal};
pub use solve::{
    amplitudes_from_nodes, amplitudes_from_nodes_with, complex_amplitudes_from_nodes,
    complex_amplitudes_from_nodes_with, prony_solve, prony_solve_with, AmplitudeFit,
    PronySolution, SolveOutcome, SolverConfig,
};
