//! The single-letter rate-distortion problem
//! `R(D) = min { I(X;Y) : P_XY has X-marginal P_X and E d(X,Y) <= D }`,
//! its backward channel `P_{X|Y}`, and reduction of the reproduction
//! alphabet to the symbols an optimal law actually uses.
//!
//! The minimizer is found by alternating minimization at a fixed slope `s`
//! (Blahut–Arimoto), with bisection on `s` to meet the target distortion.

mod distortion;
mod solver;
mod uniqueness;

pub use distortion::DistortionMeasure;
pub use solver::{
    backward_channel, check_membership_a, reduce_alphabet, solve_rd, solve_rd_with, RdSolution,
    SolverOptions, TraceStep, DEFAULT_REDUCTION_THRESHOLD,
};
pub use uniqueness::{backward_uniqueness_probe, UniquenessReport};
