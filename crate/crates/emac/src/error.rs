//! Error type shared across the crate.

use thiserror::Error;

/// Unified error type for construction, solving, retrieval, and I/O.
#[derive(Debug, Error)]
pub enum EmacError {
    /// A mode or signal violated a type invariant (frequency range, damping sign, ...).
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    /// Signal has no modes where at least one is required.
    #[error("operation requires at least one mode")]
    EmptySignal,

    /// Grid dimensions disagree with the shape or with another grid.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Reference grid is identically zero, so a relative error is undefined.
    #[error("reference grid is all-zero; relative error undefined")]
    ZeroReference,

    /// An index lies outside the grid.
    #[error("index ({0}, {1}) out of range for {2}x{3} grid")]
    OutOfRange(usize, usize, usize, usize),

    /// The same grid entry was supplied twice as an observation.
    #[error("duplicate observation at ({0}, {1})")]
    DuplicateObservation(usize, usize),

    /// A solve was started with no observations.
    #[error("observation set is empty")]
    EmptyObservation,

    /// Gram construction needs at least one frequency.
    #[error("frequency list is empty")]
    EmptyFrequencies,

    /// Requested model order exceeds what the pencil can support.
    #[error("model order {r} too large for pencil k={k}, n={n} (max {max})")]
    OrderTooLarge { r: usize, k: usize, n: usize, max: usize },

    /// Singular-value ratio indicates the requested model order overshoots the data rank.
    #[error("rank deficient: sigma_{r}/sigma_1 = {ratio:.3e} below cutoff")]
    RankDeficient { r: usize, ratio: f64 },

    /// Two poles coincide to working precision; the Vandermonde system is singular.
    #[error("degenerate poles: |p_{i} - p_{j}| = {dist:.3e}")]
    DegeneratePoles { i: usize, j: usize, dist: f64 },

    /// Mask requests more samples than the grid holds (or zero).
    #[error("cannot draw {m} samples from a {n1}x{n2} grid")]
    TooManySamples { m: usize, n1: usize, n2: usize },

    /// Could not place modes at the requested separation within the attempt cap.
    #[error("could not draw {r} frequencies with separation {sep} in {attempts} attempts")]
    SeparationInfeasible { r: usize, sep: f64, attempts: usize },

    /// LAPACK backend failure (non-convergence etc.); carries the backend message.
    #[error("linear algebra backend error: {0}")]
    Backend(String),

    /// Malformed input file (CSV or JSON).
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ndarray_linalg::error::LinalgError> for EmacError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        EmacError::Backend(e.to_string())
    }
}

impl From<serde_json::Error> for EmacError {
    fn from(e: serde_json::Error) -> Self {
        EmacError::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, EmacError>;
