//! Spatial quantum correlations of high-gain parametric down-conversion.
//!
//! Two routes to the same observables: a stochastic Wigner split-step solver
//! ([`propagator`]) and closed-form plane-wave-pump results ([`pwpa`]).

pub mod detection;
pub mod error;
pub mod experiment;
pub mod model;
pub mod optics;
pub mod output;
pub mod propagator;
pub mod pwpa;

pub use error::{Error, Result};
