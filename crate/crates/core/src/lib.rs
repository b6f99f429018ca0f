//! Typed entity-attribute graphs and the machinery for probing what
//! message-passing networks can and cannot detect on them.
//!
//! - [`graph`]: typed multigraphs, the entity-attribute view, port numbering.
//! - [`oracles`]: brute-force duplicate, cycle and walk predicates.
//! - [`refine`]: adaptation-aware color refinement.
//! - [`mpnn`]: a numeric MPNN with random weights.
//! - [`constructions`]: exact layer-by-layer detectors.
//! - [`separation`]: the graph pairs that separate architectures.
//! - [`harness`]: experiment drivers and reports.

pub mod adaptation;
pub mod constructions;
pub mod format;
pub mod graph;
pub mod harness;
pub mod mpnn;
pub mod oracles;
pub mod refine;
pub mod separation;

pub use adaptation::AdaptationSet;
