//! Fractional moments of model responses from polynomial chaos expansions.
//!
//! The pipeline: sample an experimental design, fit a PCE by least squares,
//! post-process its coefficients into the first four moments, estimate
//! absolute fractional moments by Hölder's inequality, and fit the
//! 8-parameter M-EIGD-LESND distribution to them. A benchmark harness
//! compares this route with plain Latin hypercube sampling.

pub mod cli;
pub mod config;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod fracmoments;
pub mod meigd;
pub mod metrics;
pub mod models;
pub mod pce;
pub mod polybasis;
pub mod quadrature;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};
