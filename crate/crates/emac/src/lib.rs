//! Recovery of spectrally sparse signals from partial, noisy, or corrupted
//! samples.
//!
//! The pipeline: a data grid whose entries are sums of a few complex sinusoids
//! is lifted to a two-fold Hankel ("enhanced") matrix whose rank is bounded by
//! the number of modes. Missing entries are filled in by singular-value
//! thresholding iterations that alternate low-rank shrinkage with projection
//! back onto the Hankel structure and the observed data — with variants for
//! exact data, a noise ball, and sparse outliers. Completed grids feed a
//! matrix-pencil frequency estimator; Gram-matrix diagnostics report how well
//! conditioned a mode set is for recovery; a Monte Carlo harness reproduces
//! phase-transition and stability experiments.

extern crate blas_src;
extern crate openblas_src;

pub mod error;
pub mod hankel;
pub mod harness;
pub mod incoherence;
pub mod io;
pub mod retrieval;
pub mod solvers;
pub mod signal;

pub use error::{EmacError, Result};
