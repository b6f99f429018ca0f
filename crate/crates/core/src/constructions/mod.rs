//! Exact layer-by-layer detectors.
//!
//! Each detector is written as a sequence of stages. A stage reads only the
//! per-node state produced by the stage before it plus the messages arriving
//! along edges, so the number of stages is the number of message-passing
//! layers the detector needs. Multisets are sorted association lists with
//! integer counts.

mod cycle;
mod dup1;
mod dupr;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{
    validate_entity_attribute, validate_ports, EntityAttributeReport, EntityAttributeView, GraphError,
    NodeId, PortAssignment, PortReport, TypedMultigraph,
};

pub use cycle::{cyc_ego, CycTrace};
pub use dup1::{dup1_multigraph, dup1_simple};
pub use dupr::{dupr_ego, dupr_ego_multigraph, DuprTrace};

/// Per-entity binary outputs, keyed by node id.
pub type EntityOutputs = BTreeMap<NodeId, bool>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("the graph has parallel edges; use the port-based variant")]
    NotSimple,
    #[error("not a valid entity-attribute graph: {0:?}")]
    InvalidTeag(Box<EntityAttributeReport>),
    #[error("invalid port assignment: {0:?}")]
    InvalidPorts(PortReport),
    #[error("threshold r must be at least 1")]
    ZeroThreshold,
    #[error("ego {ego} has type {expected} but ego-flagged messages carried {found:?}")]
    EgoTypeMismatch { ego: NodeId, expected: String, found: Vec<String> },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Sorted `(key, count)` list built from an unsorted stream of keys.
pub(crate) fn multiset<K: Ord>(keys: impl IntoIterator<Item = K>) -> Vec<(K, usize)> {
    let mut counts: BTreeMap<K, usize> = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

fn require_teag(view: &EntityAttributeView<'_>) -> Result<(), ConstructionError> {
    let report = validate_entity_attribute(view.graph(), view);
    if report.is_valid() {
        Ok(())
    } else {
        Err(ConstructionError::InvalidTeag(Box::new(report)))
    }
}

fn require_ports(graph: &TypedMultigraph, ports: &PortAssignment) -> Result<(), ConstructionError> {
    let report = validate_ports(graph, ports)?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(ConstructionError::InvalidPorts(report))
    }
}
