//! Directed multigraph port numbering.
//!
//! Every edge carries an incoming port `p_in` (a label at its destination) and
//! an outgoing port `p_out` (a label at its source). A valid assignment obeys:
//!
//! - (i) parallel edges between the same `(src, dst)` share both ports,
//! - (ii) edges into one destination from distinct sources get distinct `p_in`,
//! - (iii) edges out of one source to distinct destinations get distinct `p_out`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EdgeId, GraphError, NodeId, TypedMultigraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Ports {
    pub p_in: u32,
    pub p_out: u32,
}

/// Port labels indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortAssignment {
    ports: Vec<Ports>,
}

impl PortAssignment {
    pub fn new(ports: Vec<Ports>) -> Self {
        Self { ports }
    }

    /// Build from `(edge, ports)` entries; every edge in `0..edge_count` must
    /// appear.
    pub fn from_entries(
        edge_count: usize,
        entries: impl IntoIterator<Item = (EdgeId, Ports)>,
    ) -> Result<Self, GraphError> {
        let mut slots: Vec<Option<Ports>> = vec![None; edge_count];
        for (e, p) in entries {
            *slots.get_mut(e).ok_or(GraphError::UnknownEdge(e))? = Some(p);
        }
        let ports = slots
            .into_iter()
            .enumerate()
            .map(|(e, p)| p.ok_or(GraphError::MissingPorts(e)))
            .collect::<Result<_, _>>()?;
        Ok(Self { ports })
    }

    pub fn len(&self) -> usize {
        self.ports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ports.is_empty()
    }

    pub fn get(&self, e: EdgeId) -> Option<Ports> {
        self.ports.get(e).copied()
    }

    pub fn p_in(&self, e: EdgeId) -> u32 {
        self.ports[e].p_in
    }

    pub fn p_out(&self, e: EdgeId) -> u32 {
        self.ports[e].p_out
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, Ports)> + '_ {
        self.ports.iter().copied().enumerate()
    }

    pub fn max_p_in(&self) -> u32 {
        self.ports.iter().map(|p| p.p_in).max().unwrap_or(0)
    }

    pub fn max_p_out(&self) -> u32 {
        self.ports.iter().map(|p| p.p_out).max().unwrap_or(0)
    }

    /// Check that this assignment belongs to `graph` (one entry per edge).
    pub fn check_covers(&self, graph: &TypedMultigraph) -> Result<(), GraphError> {
        if self.ports.len() == graph.edge_count() {
            Ok(())
        } else {
            Err(GraphError::PortCountMismatch { expected: graph.edge_count(), got: self.ports.len() })
        }
    }
}

/// Offending edges per property. Empty lists mean the property holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortReport {
    pub non_positive: Vec<EdgeId>,
    /// Property (i): parallel edges disagreeing on a port.
    pub parallel_mismatch: Vec<EdgeId>,
    /// Property (ii): distinct sources sharing an incoming port.
    pub in_port_clash: Vec<EdgeId>,
    /// Property (iii): distinct destinations sharing an outgoing port.
    pub out_port_clash: Vec<EdgeId>,
}

impl PortReport {
    pub fn is_valid(&self) -> bool {
        self.non_positive.is_empty()
            && self.parallel_mismatch.is_empty()
            && self.in_port_clash.is_empty()
            && self.out_port_clash.is_empty()
    }

    /// Properties (i) and (ii) only: the incoming-port sub-scheme.
    pub fn incoming_valid(&self) -> bool {
        self.non_positive.is_empty()
            && self.parallel_mismatch.is_empty()
            && self.in_port_clash.is_empty()
    }
}

pub fn validate_ports(
    graph: &TypedMultigraph,
    ports: &PortAssignment,
) -> Result<PortReport, GraphError> {
    ports.check_covers(graph)?;
    let mut report = PortReport::default();

    let mut by_pair: BTreeMap<(NodeId, NodeId), Vec<EdgeId>> = BTreeMap::new();
    for (e, edge) in graph.edges().iter().enumerate() {
        let p = ports.ports[e];
        if p.p_in == 0 || p.p_out == 0 {
            report.non_positive.push(e);
        }
        by_pair.entry((edge.src, edge.dst)).or_default().push(e);
    }
    for group in by_pair.values() {
        let first = ports.ports[group[0]];
        if group.iter().any(|&e| ports.ports[e] != first) {
            report.parallel_mismatch.extend(group);
        }
    }

    // (ii): at each destination, p_in -> set of sources.
    let mut in_use: BTreeMap<(NodeId, u32), Vec<EdgeId>> = BTreeMap::new();
    let mut out_use: BTreeMap<(NodeId, u32), Vec<EdgeId>> = BTreeMap::new();
    for (e, edge) in graph.edges().iter().enumerate() {
        in_use.entry((edge.dst, ports.ports[e].p_in)).or_default().push(e);
        out_use.entry((edge.src, ports.ports[e].p_out)).or_default().push(e);
    }
    for group in in_use.values() {
        let src = graph.edge(group[0]).src;
        if group.iter().any(|&e| graph.edge(e).src != src) {
            report.in_port_clash.extend(group);
        }
    }
    for group in out_use.values() {
        let dst = graph.edge(group[0]).dst;
        if group.iter().any(|&e| graph.edge(e).dst != dst) {
            report.out_port_clash.extend(group);
        }
    }
    for list in [
        &mut report.parallel_mismatch,
        &mut report.in_port_clash,
        &mut report.out_port_clash,
    ] {
        list.sort_unstable();
        list.dedup();
    }
    Ok(report)
}

/// Deterministic valid assignment: at each node, distinct predecessors
/// (successors) are numbered 1, 2, ... in ascending node-id order.
pub fn assign_canonical_ports(graph: &TypedMultigraph) -> PortAssignment {
    let preds: Vec<Vec<NodeId>> = graph.nodes().map(|v| graph.predecessors(v)).collect();
    let succs: Vec<Vec<NodeId>> = graph.nodes().map(|v| graph.successors(v)).collect();
    let rank = |list: &[NodeId], x: NodeId| {
        list.binary_search(&x).expect("endpoint is adjacent") as u32 + 1
    };
    let ports = graph
        .edges()
        .iter()
        .map(|e| Ports { p_in: rank(&preds[e.dst], e.src), p_out: rank(&succs[e.src], e.dst) })
        .collect();
    PortAssignment { ports }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, TypeKind};

    fn star(sources: usize, parallel: usize) -> TypedMultigraph {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        let a = b.node_type("alpha", TypeKind::Attribute).unwrap();
        let t = b.edge_type("tau1").unwrap();
        let srcs: Vec<_> = (0..sources).map(|_| b.add_node(s).unwrap()).collect();
        let x = b.add_node(a).unwrap();
        for &u in &srcs {
            for _ in 0..parallel {
                b.add_edge(u, x, t).unwrap();
            }
        }
        b.build().unwrap()
    }

    #[test]
    fn single_edge_gets_port_one() {
        let g = star(1, 1);
        let p = assign_canonical_ports(&g);
        assert_eq!(p.get(0), Some(Ports { p_in: 1, p_out: 1 }));
    }

    #[test]
    fn parallel_edges_share_ports() {
        let g = star(1, 2);
        let p = assign_canonical_ports(&g);
        assert_eq!(p.get(0), p.get(1));
        assert_eq!(p.get(0), Some(Ports { p_in: 1, p_out: 1 }));
        assert!(validate_ports(&g, &p).unwrap().is_valid());
    }

    #[test]
    fn two_sources_get_ascending_in_ports() {
        // u, v -> a
        let g = star(2, 1);
        let p = assign_canonical_ports(&g);
        assert_eq!(p.p_in(0), 1);
        assert_eq!(p.p_in(1), 2);
        assert_eq!(p.p_out(0), 1);
        assert_eq!(p.p_out(1), 1);
    }

    #[test]
    fn clashing_in_ports_fail_property_ii() {
        let g = star(2, 1);
        let bad = PortAssignment::new(vec![Ports { p_in: 1, p_out: 1 }; 2]);
        let report = validate_ports(&g, &bad).unwrap();
        assert!(!report.is_valid());
        assert_eq!(report.in_port_clash, vec![0, 1]);
        assert!(report.parallel_mismatch.is_empty());
    }

    #[test]
    fn parallel_mismatch_fails_property_i() {
        let g = star(1, 2);
        let bad = PortAssignment::new(vec![Ports { p_in: 1, p_out: 1 }, Ports { p_in: 2, p_out: 1 }]);
        let report = validate_ports(&g, &bad).unwrap();
        assert_eq!(report.parallel_mismatch, vec![0, 1]);
    }

    #[test]
    fn zero_ports_and_missing_entries() {
        let g = star(1, 1);
        let zero = PortAssignment::new(vec![Ports { p_in: 0, p_out: 1 }]);
        assert_eq!(validate_ports(&g, &zero).unwrap().non_positive, vec![0]);
        let short = PortAssignment::new(vec![]);
        assert!(matches!(validate_ports(&g, &short), Err(GraphError::PortCountMismatch { .. })));
        assert_eq!(
            PortAssignment::from_entries(2, [(0, Ports { p_in: 1, p_out: 1 })]),
            Err(GraphError::MissingPorts(1))
        );
    }
}
