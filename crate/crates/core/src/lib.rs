//! Degree-preserving growth of simple graphs.
//!
//! A DP-step inserts a vertex by lifting a matching: every chosen edge `uv`
//! is replaced by `uw` and `wv`, so no existing vertex changes degree. Odd
//! degrees are handled with a single stub-edge carried between steps. The
//! inverse DP-removal deletes a vertex and restores a matching of non-edges
//! inside its neighborhood.

pub mod analysis;
pub mod gadgets;
pub mod graph;
pub mod growth;
pub mod io;
pub mod matching;
pub mod reduce;
pub mod rng;
pub mod trace;

pub use graph::{DegreeHistogram, Edge, ExtEdge, Graph, GraphError, StubGraph, VertexId};
pub use matching::{Matching, MatchingError, MatchingStrategy};
pub use growth::{grow, DpStepRecord, GrowthError, OpKind, Protocol, ProtocolConfig};
pub use reduce::{RemovabilityCertificate, ReduceError};
pub use trace::{Trace, TraceEvent};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
