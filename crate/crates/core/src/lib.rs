//! Analytical communication and computation cost model for distributed GNN
//! training, comparing full-graph (partition-parallel) against mini-batch
//! (sample-parallel) pipelines without training anything.
//!
//! The pipeline is: load a [`graph::CsrGraph`], partition it
//! ([`partition`]), plan and sample one epoch of micro-batches
//! ([`sampler`]), then evaluate the four cost totals ([`cost`]).

pub mod cost;
pub mod error;
pub mod graph;
pub mod partition;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
