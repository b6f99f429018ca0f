//! Typed directed multigraphs.
//!
//! A [`TypedMultigraph`] carries an immutable catalog of node types and edge
//! types, a dense list of nodes and a dense list of edges. Parallel edges are
//! allowed: two edges with the same `(src, dst, type)` triple still get distinct
//! edge ids. Graphs are built once through [`GraphBuilder`] and never mutated.

mod ports;
mod view;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ports::{assign_canonical_ports, validate_ports, PortAssignment, PortReport, Ports};
pub use view::{
    validate_entity_attribute, Bipartition, EntityAttributeReport, EntityAttributeView,
    TypedNeighborhood,
};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeTypeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeTypeId(pub u32);

impl NodeTypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeTypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Which side of an entity-attribute bipartition a node type belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Entity,
    Attribute,
    /// Node types of general typed digraphs that carry no bipartition role.
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeTypeDef {
    pub name: String,
    pub kind: TypeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub ty: EdgeTypeId,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown node type id {0}")]
    UnknownNodeType(u32),
    #[error("unknown edge type id {0}")]
    UnknownEdgeType(u32),
    #[error("duplicate type name {0:?}")]
    DuplicateTypeName(String),
    #[error("node {0} is not an entity")]
    NotEntity(NodeId),
    #[error("no ports assigned for edge {0}")]
    MissingPorts(EdgeId),
    #[error("port assignment covers {got} edges, graph has {expected}")]
    PortCountMismatch { expected: usize, got: usize },
    #[error("port numbers must be positive (edge {0})")]
    NonPositivePort(EdgeId),
}

/// Immutable typed directed multigraph with precomputed adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedMultigraph {
    node_types: Vec<NodeTypeDef>,
    edge_types: Vec<String>,
    nodes: Vec<NodeTypeId>,
    names: Vec<Option<String>>,
    edges: Vec<Edge>,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
    bipartition: Option<Bipartition>,
}

impl TypedMultigraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        0..self.nodes.len()
    }

    pub fn node_types(&self) -> &[NodeTypeDef] {
        &self.node_types
    }

    pub fn edge_types(&self) -> &[String] {
        &self.edge_types
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn node_type(&self, v: NodeId) -> NodeTypeId {
        self.nodes[v]
    }

    pub fn node_type_def(&self, v: NodeId) -> &NodeTypeDef {
        &self.node_types[self.nodes[v].index()]
    }

    pub fn node_type_name(&self, ty: NodeTypeId) -> &str {
        &self.node_types[ty.index()].name
    }

    pub fn edge_type_name(&self, ty: EdgeTypeId) -> &str {
        &self.edge_types[ty.index()]
    }

    pub fn node_type_id(&self, name: &str) -> Option<NodeTypeId> {
        self.node_types
            .iter()
            .position(|t| t.name == name)
            .map(|i| NodeTypeId(i as u32))
    }

    pub fn edge_type_id(&self, name: &str) -> Option<EdgeTypeId> {
        self.edge_types
            .iter()
            .position(|t| t == name)
            .map(|i| EdgeTypeId(i as u32))
    }

    /// Display name of a node; falls back to `#<id>`.
    pub fn node_name(&self, v: NodeId) -> String {
        self.names[v].clone().unwrap_or_else(|| format!("#{v}"))
    }

    pub fn has_name(&self, v: NodeId) -> bool {
        self.names[v].is_some()
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n.as_deref() == Some(name))
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_edges[v].len()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_edges[v].len()
    }

    pub fn max_in_degree(&self) -> usize {
        self.in_edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_out_degree(&self) -> usize {
        self.out_edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        v < self.nodes.len()
    }

    pub fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if self.contains_node(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(v))
        }
    }

    /// Declared entity/attribute bipartition, if the graph was built with one.
    pub fn bipartition(&self) -> Option<&Bipartition> {
        self.bipartition.as_ref()
    }

    /// The entity-attribute view of this graph: the declared bipartition when
    /// present, otherwise the split induced by node type kinds.
    pub fn view(&self) -> EntityAttributeView<'_> {
        match &self.bipartition {
            Some(b) => EntityAttributeView::new(self, &b.entities, &b.attributes)
                .expect("bipartition ids are checked at construction"),
            None => EntityAttributeView::from_type_kinds(self),
        }
    }

    /// True iff every node has in-degree exactly 1 and out-degree exactly 1.
    pub fn is_functional(&self) -> bool {
        self.nodes().all(|v| self.in_degree(v) == 1 && self.out_degree(v) == 1)
    }

    /// Sorted multiset of `(node type name, in-degree, out-degree)` triples.
    pub fn degree_type_profile(&self) -> Vec<(String, usize, usize)> {
        let mut profile: Vec<_> = self
            .nodes()
            .map(|v| {
                (
                    self.node_type_def(v).name.clone(),
                    self.in_degree(v),
                    self.out_degree(v),
                )
            })
            .collect();
        profile.sort();
        profile
    }

    /// Multiplicity of each `(src, dst, type)` triple, keyed in ascending order.
    pub fn edge_multiplicities(&self) -> BTreeMap<(NodeId, NodeId, EdgeTypeId), usize> {
        let mut counts = BTreeMap::new();
        for e in &self.edges {
            *counts.entry((e.src, e.dst, e.ty)).or_insert(0) += 1;
        }
        counts
    }

    /// Distinct successors of `v`, ascending.
    pub fn successors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<_> = self.out_edges[v].iter().map(|&e| self.edges[e].dst).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Distinct predecessors of `v`, ascending.
    pub fn predecessors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<_> = self.in_edges[v].iter().map(|&e| self.edges[e].src).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Rebuild the graph with node `v` renamed to `perm[v]`. Edge ids are kept.
    pub fn relabel(&self, perm: &[NodeId]) -> Result<TypedMultigraph, GraphError> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(GraphError::UnknownNode(perm.len()));
        }
        let mut inverse = vec![usize::MAX; n];
        for (old, &new) in perm.iter().enumerate() {
            if new >= n || inverse[new] != usize::MAX {
                return Err(GraphError::UnknownNode(new));
            }
            inverse[new] = old;
        }
        let mut b = GraphBuilder::with_catalog(self.node_types.clone(), self.edge_types.clone())?;
        for &old in &inverse {
            b.add_node_with_name(self.nodes[old], self.names[old].clone())?;
        }
        for e in &self.edges {
            b.add_edge(perm[e.src], perm[e.dst], e.ty)?;
        }
        if let Some(bp) = &self.bipartition {
            b.set_bipartition(Bipartition {
                entities: bp.entities.iter().map(|&v| perm[v]).collect(),
                attributes: bp.attributes.iter().map(|&v| perm[v]).collect(),
            });
        }
        b.build()
    }
}

impl fmt::Display for TypedMultigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypedMultigraph({} nodes, {} edges)", self.node_count(), self.edge_count())
    }
}

/// Single-owner builder. The type catalog is fixed once nodes are added.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    node_types: Vec<NodeTypeDef>,
    edge_types: Vec<String>,
    nodes: Vec<NodeTypeId>,
    names: Vec<Option<String>>,
    edges: Vec<Edge>,
    bipartition: Option<Bipartition>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_catalog(
        node_types: Vec<NodeTypeDef>,
        edge_types: Vec<String>,
    ) -> Result<Self, GraphError> {
        let mut b = Self::new();
        for t in node_types {
            b.node_type(&t.name, t.kind)?;
        }
        for t in edge_types {
            b.edge_type(&t)?;
        }
        Ok(b)
    }

    pub fn node_type(&mut self, name: &str, kind: TypeKind) -> Result<NodeTypeId, GraphError> {
        if self.node_types.iter().any(|t| t.name == name) {
            return Err(GraphError::DuplicateTypeName(name.to_string()));
        }
        self.node_types.push(NodeTypeDef { name: name.to_string(), kind });
        Ok(NodeTypeId(self.node_types.len() as u32 - 1))
    }

    pub fn edge_type(&mut self, name: &str) -> Result<EdgeTypeId, GraphError> {
        if self.edge_types.iter().any(|t| t == name) {
            return Err(GraphError::DuplicateTypeName(name.to_string()));
        }
        self.edge_types.push(name.to_string());
        Ok(EdgeTypeId(self.edge_types.len() as u32 - 1))
    }

    pub fn add_node(&mut self, ty: NodeTypeId) -> Result<NodeId, GraphError> {
        self.add_node_with_name(ty, None)
    }

    pub fn add_named_node(&mut self, ty: NodeTypeId, name: &str) -> Result<NodeId, GraphError> {
        self.add_node_with_name(ty, Some(name.to_string()))
    }

    fn add_node_with_name(
        &mut self,
        ty: NodeTypeId,
        name: Option<String>,
    ) -> Result<NodeId, GraphError> {
        if ty.index() >= self.node_types.len() {
            return Err(GraphError::UnknownNodeType(ty.0));
        }
        self.nodes.push(ty);
        self.names.push(name);
        Ok(self.nodes.len() - 1)
    }

    pub fn add_edge(
        &mut self,
        src: NodeId,
        dst: NodeId,
        ty: EdgeTypeId,
    ) -> Result<EdgeId, GraphError> {
        for v in [src, dst] {
            if v >= self.nodes.len() {
                return Err(GraphError::UnknownNode(v));
            }
        }
        if ty.index() >= self.edge_types.len() {
            return Err(GraphError::UnknownEdgeType(ty.0));
        }
        self.edges.push(Edge { src, dst, ty });
        Ok(self.edges.len() - 1)
    }

    pub fn set_bipartition(&mut self, bipartition: Bipartition) {
        self.bipartition = Some(bipartition);
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn build(self) -> Result<TypedMultigraph, GraphError> {
        let n = self.nodes.len();
        if let Some(bp) = &self.bipartition {
            if let Some(&bad) = bp.entities.iter().chain(&bp.attributes).find(|&&v| v >= n) {
                return Err(GraphError::UnknownNode(bad));
            }
        }
        let mut in_edges = vec![Vec::new(); n];
        let mut out_edges = vec![Vec::new(); n];
        for (id, e) in self.edges.iter().enumerate() {
            out_edges[e.src].push(id);
            in_edges[e.dst].push(id);
        }
        Ok(TypedMultigraph {
            node_types: self.node_types,
            edge_types: self.edge_types,
            nodes: self.nodes,
            names: self.names,
            edges: self.edges,
            in_edges,
            out_edges,
            bipartition: self.bipartition,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cycles(l: usize) -> TypedMultigraph {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Plain).unwrap();
        let t = b.edge_type("tau1").unwrap();
        for _ in 0..2 * l {
            b.add_node(s).unwrap();
        }
        for c in 0..2 {
            for i in 0..l {
                b.add_edge(c * l + i, c * l + (i + 1) % l, t).unwrap();
            }
        }
        b.build().unwrap()
    }

    #[test]
    fn parallel_edges_get_distinct_ids() {
        let mut b = GraphBuilder::new();
        let e = b.node_type("sigma", TypeKind::Entity).unwrap();
        let a = b.node_type("alpha", TypeKind::Attribute).unwrap();
        let t = b.edge_type("tau1").unwrap();
        let u = b.add_node(e).unwrap();
        let x = b.add_node(a).unwrap();
        let e0 = b.add_edge(u, x, t).unwrap();
        let e1 = b.add_edge(u, x, t).unwrap();
        assert_ne!(e0, e1);
        let g = b.build().unwrap();
        assert_eq!(g.edge_multiplicities()[&(u, x, t)], 2);
        assert_eq!(g.successors(u), vec![x]);
    }

    #[test]
    fn builder_rejects_dangling_references() {
        let mut b = GraphBuilder::new();
        assert_eq!(b.add_node(NodeTypeId(0)), Err(GraphError::UnknownNodeType(0)));
        let s = b.node_type("s", TypeKind::Plain).unwrap();
        let t = b.edge_type("t").unwrap();
        b.add_node(s).unwrap();
        assert_eq!(b.add_edge(0, 3, t), Err(GraphError::UnknownNode(3)));
        assert_eq!(b.add_edge(0, 0, EdgeTypeId(5)), Err(GraphError::UnknownEdgeType(5)));
        assert!(matches!(b.node_type("s", TypeKind::Entity), Err(GraphError::DuplicateTypeName(_))));
    }

    #[test]
    fn functional_graphs() {
        assert!(two_cycles(3).is_functional());
        let mut b = GraphBuilder::new();
        let s = b.node_type("s", TypeKind::Plain).unwrap();
        let t = b.edge_type("t").unwrap();
        for _ in 0..6 {
            b.add_node(s).unwrap();
        }
        for i in 0..6 {
            b.add_edge(i, (i + 1) % 6, t).unwrap();
        }
        assert!(b.build().unwrap().is_functional());
    }

    #[test]
    fn relabel_preserves_profile() {
        let g = two_cycles(4);
        let perm: Vec<_> = (0..8).rev().collect();
        let h = g.relabel(&perm).unwrap();
        assert_eq!(g.degree_type_profile(), h.degree_type_profile());
        assert_eq!(h.edge(0).src, 7);
        assert!(g.relabel(&[0, 0, 1, 2, 3, 4, 5, 6]).is_err());
    }
}
