//! Exact event-driven simulation of a random walk driven by a field of
//! independent random walks, with a multi-scale block analyzer for d = 1.

pub mod alias;
pub mod environment;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod model;
pub mod renorm;
pub mod rng;

pub use error::{Error, Result};
pub mod stats;
pub mod walker;
