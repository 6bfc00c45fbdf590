//! Hidden-space reconstruction of undirected networks and the link-prediction
//! machinery built on top of it.
//!
//! A graph is embedded into a low-dimensional Euclidean space from the
//! leading non-trivial eigenvectors of the degree-normalised adjacency
//! matrix `N_α = K^{-α} A`. Negative hidden-space distance then serves as a
//! similarity score, which is evaluated against the classical local and
//! global indices (CN, Jaccard, RA, AA, Katz, SPM) with the usual
//! train/probe AUC and precision protocol.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, the CLI and
//! thread-level parallelism live in the `hspace` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod embed;
mod error;
pub mod eval;
pub mod geo;
pub mod graph;
pub mod linalg;
mod math;
pub mod model;
pub mod quad;
pub mod rng;
pub mod scores;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId, NodeIdMap, Pair};
pub use scores::ScoreTable;
