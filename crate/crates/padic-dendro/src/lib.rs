//! Exact p-adic arithmetic, dendrograms on the Bruhat-Tits tree,
//! hierarchical classification, tree invariants and dendrogram time series.

pub mod classify;
pub mod cli;
pub mod dendrogram;
pub mod error;
pub mod expr;
pub mod graph;
pub mod invariants;
pub mod padic;
pub mod strings;
pub mod timeseries;

pub use error::{Error, Result};
