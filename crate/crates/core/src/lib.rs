//! Laboratory for the LOCAL and SLOCAL models of distributed graph computation.
//!
//! Everything runs centrally, but every algorithm goes through an engine that
//! accounts for how far each node looked, and every output has a verifier.

pub mod cf;
pub mod decomposition;
pub mod error;
pub mod graph;
pub mod ilp;
pub mod local;
pub mod reductions;
pub mod rng;
pub mod slocal;
pub mod splitting;

pub use error::{Error, Result};
pub use graph::{BipartiteGraph, EmbeddingMap, Graph, Hypergraph};
