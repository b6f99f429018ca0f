use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{EdgeId, EdgeTypeId, GraphError, NodeId, TypeKind, TypedMultigraph};

/// Set of `(attribute, edge type)` pairs reachable from an entity.
pub type TypedNeighborhood = BTreeSet<(NodeId, EdgeTypeId)>;

/// Entity and attribute node-id sets as declared in an interchange file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub entities: Vec<NodeId>,
    pub attributes: Vec<NodeId>,
}

/// Entity-attribute certificate over a [`TypedMultigraph`].
///
/// Construction only checks that the ids exist; the structural invariants are
/// reported by [`validate_entity_attribute`].
#[derive(Debug, Clone)]
pub struct EntityAttributeView<'g> {
    graph: &'g TypedMultigraph,
    entity: Vec<bool>,
    attribute: Vec<bool>,
}

impl<'g> EntityAttributeView<'g> {
    pub fn new(
        graph: &'g TypedMultigraph,
        entities: &[NodeId],
        attributes: &[NodeId],
    ) -> Result<Self, GraphError> {
        let n = graph.node_count();
        let mut entity = vec![false; n];
        let mut attribute = vec![false; n];
        for &v in entities {
            graph.check_node(v)?;
            entity[v] = true;
        }
        for &v in attributes {
            graph.check_node(v)?;
            attribute[v] = true;
        }
        Ok(Self { graph, entity, attribute })
    }

    /// Split nodes by the kind of their registered type. Plain-typed nodes land
    /// on neither side.
    pub fn from_type_kinds(graph: &'g TypedMultigraph) -> Self {
        let kinds: Vec<_> = graph.nodes().map(|v| graph.node_type_def(v).kind).collect();
        Self {
            graph,
            entity: kinds.iter().map(|&k| k == TypeKind::Entity).collect(),
            attribute: kinds.iter().map(|&k| k == TypeKind::Attribute).collect(),
        }
    }

    pub fn graph(&self) -> &'g TypedMultigraph {
        self.graph
    }

    pub fn is_entity(&self, v: NodeId) -> bool {
        self.entity.get(v).copied().unwrap_or(false)
    }

    pub fn is_attribute(&self, v: NodeId) -> bool {
        self.attribute.get(v).copied().unwrap_or(false)
    }

    pub fn entities(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entity.iter().enumerate().filter(|(_, &e)| e).map(|(v, _)| v)
    }

    pub fn attributes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.attribute.iter().enumerate().filter(|(_, &a)| a).map(|(v, _)| v)
    }

    pub fn check_entity(&self, v: NodeId) -> Result<(), GraphError> {
        self.graph.check_node(v)?;
        if self.is_entity(v) {
            Ok(())
        } else {
            Err(GraphError::NotEntity(v))
        }
    }

    /// `{(a, τ) : (u, a, τ) ∈ E}` with parallel edges collapsed.
    pub fn typed_neighborhood(&self, u: NodeId) -> Result<TypedNeighborhood, GraphError> {
        self.check_entity(u)?;
        Ok(self
            .graph
            .out_edges(u)
            .iter()
            .map(|&e| {
                let edge = self.graph.edge(e);
                (edge.dst, edge.ty)
            })
            .collect())
    }

    /// At most one edge per `(entity, attribute, edge type)` triple.
    pub fn is_simple(&self) -> bool {
        self.graph.edge_multiplicities().values().all(|&m| m <= 1)
    }
}

/// Outcome of [`validate_entity_attribute`]; each field is one invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityAttributeReport {
    /// Nodes on neither side.
    pub uncovered: Vec<NodeId>,
    /// Nodes on both sides.
    pub overlapping: Vec<NodeId>,
    /// Edges not running entity → attribute.
    pub direction_violations: Vec<EdgeId>,
    /// Entity-side nodes whose type is not an entity type.
    pub entity_type_violations: Vec<NodeId>,
    /// Attribute-side nodes whose type is not an attribute type.
    pub attribute_type_violations: Vec<NodeId>,
    /// Groups of parallel edges sharing `(entity, attribute, edge type)`.
    pub parallel_groups: Vec<Vec<EdgeId>>,
}

impl EntityAttributeReport {
    pub fn is_valid(&self) -> bool {
        self.uncovered.is_empty()
            && self.overlapping.is_empty()
            && self.direction_violations.is_empty()
            && self.entity_type_violations.is_empty()
            && self.attribute_type_violations.is_empty()
    }

    pub fn is_simple(&self) -> bool {
        self.parallel_groups.is_empty()
    }
}

pub fn validate_entity_attribute(
    graph: &TypedMultigraph,
    view: &EntityAttributeView<'_>,
) -> EntityAttributeReport {
    let mut report = EntityAttributeReport {
        uncovered: Vec::new(),
        overlapping: Vec::new(),
        direction_violations: Vec::new(),
        entity_type_violations: Vec::new(),
        attribute_type_violations: Vec::new(),
        parallel_groups: Vec::new(),
    };
    for v in graph.nodes() {
        let (e, a) = (view.is_entity(v), view.is_attribute(v));
        match (e, a) {
            (false, false) => report.uncovered.push(v),
            (true, true) => report.overlapping.push(v),
            _ => {}
        }
        let kind = graph.node_type_def(v).kind;
        if e && kind != TypeKind::Entity {
            report.entity_type_violations.push(v);
        }
        if a && kind != TypeKind::Attribute {
            report.attribute_type_violations.push(v);
        }
    }
    let mut groups: std::collections::BTreeMap<_, Vec<EdgeId>> = Default::default();
    for (id, edge) in graph.edges().iter().enumerate() {
        if !(view.is_entity(edge.src) && view.is_attribute(edge.dst)) {
            report.direction_violations.push(id);
        }
        groups.entry((edge.src, edge.dst, edge.ty)).or_default().push(id);
    }
    report.parallel_groups = groups.into_values().filter(|g| g.len() > 1).collect();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    /// Two Person entities, three attributes, four typed edges.
    fn person_graph() -> TypedMultigraph {
        let mut b = GraphBuilder::new();
        let person = b.node_type("Person", TypeKind::Entity).unwrap();
        let email = b.node_type("Email", TypeKind::Attribute).unwrap();
        let phone = b.node_type("Phone", TypeKind::Attribute).unwrap();
        let addr = b.node_type("Address", TypeKind::Attribute).unwrap();
        let has_email = b.edge_type("hasEmail").unwrap();
        let has_phone = b.edge_type("hasPhone").unwrap();
        let has_addr = b.edge_type("hasAddr").unwrap();
        let u = b.add_named_node(person, "u").unwrap();
        let v = b.add_named_node(person, "v").unwrap();
        let e = b.add_named_node(email, "smith@x.com").unwrap();
        let p = b.add_named_node(phone, "555-1234").unwrap();
        let a = b.add_named_node(addr, "42 Main St").unwrap();
        b.add_edge(u, e, has_email).unwrap();
        b.add_edge(u, p, has_phone).unwrap();
        b.add_edge(v, e, has_email).unwrap();
        b.add_edge(v, a, has_addr).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn person_graph_is_valid_and_simple() {
        let g = person_graph();
        let report = validate_entity_attribute(&g, &g.view());
        assert!(report.is_valid(), "{report:?}");
        assert!(report.is_simple());
        assert!(!g.is_functional());
    }

    #[test]
    fn parallel_edges_make_graph_non_simple() {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        let a = b.node_type("alpha1", TypeKind::Attribute).unwrap();
        let t = b.edge_type("tau1").unwrap();
        let u = b.add_node(s).unwrap();
        let v = b.add_node(s).unwrap();
        let a1 = b.add_node(a).unwrap();
        let a2 = b.add_node(a).unwrap();
        b.add_edge(u, a1, t).unwrap();
        b.add_edge(u, a1, t).unwrap();
        b.add_edge(v, a2, t).unwrap();
        b.add_edge(v, a2, t).unwrap();
        let g = b.build().unwrap();
        let report = validate_entity_attribute(&g, &g.view());
        assert!(report.is_valid());
        assert!(!report.is_simple());
        assert_eq!(report.parallel_groups, vec![vec![0, 1], vec![2, 3]]);
        assert!(!g.view().is_simple());
    }

    #[test]
    fn reversed_edge_is_a_direction_violation() {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        let a = b.node_type("alpha", TypeKind::Attribute).unwrap();
        let t = b.edge_type("tau").unwrap();
        let u = b.add_node(s).unwrap();
        let x = b.add_node(a).unwrap();
        b.add_edge(u, x, t).unwrap();
        b.add_edge(x, u, t).unwrap();
        let g = b.build().unwrap();
        let report = validate_entity_attribute(&g, &g.view());
        assert!(!report.is_valid());
        assert_eq!(report.direction_violations, vec![1]);
    }

    #[test]
    fn mistyped_and_uncovered_nodes_are_reported() {
        let g = person_graph();
        let view = EntityAttributeView::new(&g, &[0, 2], &[2, 3]).unwrap();
        let report = validate_entity_attribute(&g, &view);
        assert_eq!(report.uncovered, vec![1, 4]);
        assert_eq!(report.overlapping, vec![2]);
        assert_eq!(report.entity_type_violations, vec![2]);
        assert!(EntityAttributeView::new(&g, &[9], &[]).is_err());
    }

    #[test]
    fn typed_neighborhood_of_person() {
        let g = person_graph();
        let view = g.view();
        let n = view.typed_neighborhood(0).unwrap();
        assert_eq!(n.len(), 2);
        assert!(n.contains(&(2, EdgeTypeId(0))));
        assert_eq!(view.typed_neighborhood(2), Err(GraphError::NotEntity(2)));
        assert_eq!(view.typed_neighborhood(17), Err(GraphError::UnknownNode(17)));
    }

    #[test]
    fn entity_without_edges_has_empty_neighborhood() {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        b.add_node(s).unwrap();
        let g = b.build().unwrap();
        assert!(g.view().typed_neighborhood(0).unwrap().is_empty());
    }
}
