//! Toric resolution and asymptotics for phase functions with flat factors.
//!
//! The crate takes a phase function given as a finite sum of monomials times
//! smooth factors (including flat atoms like `exp(-1/x^2)`), builds the
//! Newton polyhedron and its normal fan, refines the fan into unimodular
//! charts, checks nondegeneracy, and derives candidate poles, orders, and
//! leading coefficients for the associated local zeta functions and
//! oscillatory integrals. Numerical quadrature routines cross-check the
//! exact predictions.
//!
//! Everything exact is computed over arbitrary rationals (`num-rational`);
//! floating point enters only in the quadrature and fitting layers.

pub mod asymptotics;
pub mod fan;
pub mod fixtures;
pub mod funcspec;
pub mod geometry;
pub mod rat;
pub mod toric;

/// Entry point for the `torasc` binary; returns the process exit code.
pub fn run() -> i32 {
    eprintln!("torasc: command-line interface not wired up yet");
    2
}

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or out-of-domain input.
    #[error("domain error: {0}")]
    Domain(String),
    /// Text that does not parse as an expression or a spec file.
    #[error("parse error: {0}")]
    Parse(String),
    /// An operation that requires a nonempty polyhedron received the empty
    /// one.
    #[error("{0} is undefined for the empty polyhedron")]
    EmptyPolyhedron(String),
    /// A numeric routine ran out of its box or evaluation budget before
    /// reaching the requested tolerance.
    #[error("budget exhausted: {0}")]
    Budget(String),
    /// A result was requested whose supporting hypotheses could not be
    /// certified for this input; the computation is declined, not failed.
    #[error("refused: {0}")]
    Refusal(String),
    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal consistency error: {0}")]
    Internal(String),
}
