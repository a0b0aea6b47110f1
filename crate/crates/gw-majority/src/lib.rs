//! Majority-rule opinion propagation on Galton-Watson trees.
//!
//! A population is modelled by a Galton-Watson tree of height `m` whose
//! leaves carry one of `k` opinions (or none) drawn i.i.d. from a
//! probability vector. Opinions spread towards the root by relative
//! majority: undecided children are ignored unless all are undecided, a
//! strict plurality wins, and a tie at the top leaves the parent
//! undecided. The distribution of the root state is obtained by iterating
//! a one-generation map `H` on the probability simplex.
//!
//! The crate provides:
//! - the exact simplex map, iteration and diagnostics ([`simplex`]),
//! - offspring-law abstractions and generating functions ([`offspring`]),
//! - exact/numeric evaluation of the uniform-case polynomials ([`poly`]),
//! - fixed-point solvers and basin-of-attraction certificates
//!   ([`fixed_point`]),
//! - exact Budan-Fourier sign-variation certificates ([`budan`]),
//! - a central-binomial / Wallis inequality and identity suite
//!   ([`bounds`]),
//! - an independent Monte Carlo tree-sampling oracle ([`mc`]).
//!
//! With the default `parallel` feature, Monte Carlo estimation and table
//! generation distribute work with rayon; results are identical to the
//! sequential fallback.

pub mod bounds;
pub mod budan;
pub mod fixed_point;
pub mod mc;
pub mod offspring;
pub mod poly;
pub mod quad;
pub mod ratpoly;
pub mod simplex;

pub use offspring::{OffspringDistribution, SupportParity};
pub use simplex::{CanonicalState, ProbabilityVector, Trajectory};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid probability vector: {0}")]
    InvalidVector(String),
    #[error("invalid offspring distribution: {0}")]
    InvalidDistribution(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("truncation budget exhausted: residual tail mass {0:.3e}")]
    Truncation(f64),
    #[error("no sign change of f(t)-t on [{0}, {1}]")]
    NoSignChange(f64, f64),
    #[error("root finding failed: {0}")]
    Solver(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
