use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the algebraic and dynamical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },

    #[error("coordinate ({row},{col}) outside a {rows}x{cols} matrix")]
    CoordOutOfRange { row: usize, col: usize, rows: usize, cols: usize },

    #[error("denominator vanishes: |den| = {magnitude:e}")]
    DenominatorVanishes { magnitude: f64 },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("division by zero at position {pos}")]
    DivisionByZero { pos: usize },

    #[error("invalid minor: {0}")]
    InvalidMinor(String),

    #[error("{word:?} is not a reduced word of the longest element of S_{n}")]
    NotReducedWord { word: Vec<usize>, n: usize },

    #[error("exhaustive enumeration refused for n = {n} (limit {limit})")]
    SizeGuard { n: usize, limit: usize },

    #[error("Hamiltonians {a} and {b} do not commute")]
    CommutativityFailure { a: usize, b: usize },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("initial point lies on the singular locus ({label} = {value:e})")]
    OnSingularLocus { label: String, value: f64 },

    #[error("singularity approached; last good time t = {last_good}")]
    SingularityApproached { last_good: Complex64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: Complex64 },

    #[error("closed-form construction failed: {0}")]
    ClosedForm(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
