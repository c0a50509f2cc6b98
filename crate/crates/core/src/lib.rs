//! Spatial mixing, zero-freeness and series interpolation for the hard-core model
//! and for graph homomorphism partition functions.

pub mod cluster;
pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod interpolation;
pub mod io;
pub mod polymer;
pub mod series;

pub use error::{Error, Result};
pub use graph::Graph;
pub use series::PowerSeries;
