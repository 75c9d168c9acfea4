//! Transient SI epidemics on undirected graphs.
//!
//! Mean-field integration, the linearization and log-transform upper
//! bounds, exact stochastic simulation, the hazard/survival view of
//! infection times, and vaccination rankings built on the bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod linalg;
pub mod reliability;
pub mod stochastic;
pub mod vaccination;

pub use error::{Error, Result};
pub use graph::Graph;
