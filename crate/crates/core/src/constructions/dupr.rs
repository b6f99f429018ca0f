use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{multiset, require_ports, require_teag, ConstructionError};
use crate::graph::{EdgeTypeId, EntityAttributeView, NodeId, NodeTypeId, PortAssignment};

/// Intermediate states of the four-layer ego detector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuprTrace {
    pub ego: NodeId,
    pub r: usize,
    /// Layer 1, per attribute: edge types of the ego's edges into it.
    pub ego_types: BTreeMap<NodeId, Vec<EdgeTypeId>>,
    /// Layer 2, per entity: number of its typed attributes the ego shares.
    pub ov: BTreeMap<NodeId, usize>,
    /// Layer 3, per attribute: largest `ov` among non-ego senders of the ego's
    /// type, or 0 when the ego does not point here.
    pub max_ov: BTreeMap<NodeId, usize>,
    /// Layer 4: `max maxOv(a) >= r` over the ego's attributes.
    pub output: bool,
}

/// Four-layer `Dup_r` detector for the ego entity on a simple graph.
pub fn dupr_ego(view: &EntityAttributeView<'_>, ego: NodeId, r: usize) -> Result<DuprTrace, ConstructionError> {
    check_args(view, ego, r)?;
    if !view.is_simple() {
        return Err(ConstructionError::NotSimple);
    }
    let g = view.graph();
    let ego_types = layer1_ego_types(view, ego);

    // Layer 2 (reverse): messages (τ, EgoTypes(a)); count those with τ in EgoTypes(a).
    let ov = view
        .entities()
        .map(|v| {
            let messages = multiset(g.out_edges(v).iter().map(|&e| {
                let edge = g.edge(e);
                (edge.ty, ego_types[&edge.dst].clone())
            }));
            let count = messages.iter().filter(|((ty, types), _)| types.contains(ty)).map(|(_, n)| n).sum();
            (v, count)
        })
        .collect();

    finish(view, ego, r, ego_types, ov)
}

/// Four-layer `Dup_r` detector for multigraphs, using incoming ports.
///
/// Layer 1 additionally records, per `(p_in, τ)`, how many parallel edges
/// arrive with that port and type. Layer 2 messages carry their `p_in`; each
/// distinct message contributes `count / multiplicity` ego matches, so parallel
/// edges to the same attribute are counted once.
pub fn dupr_ego_multigraph(
    view: &EntityAttributeView<'_>,
    ports: &PortAssignment,
    ego: NodeId,
    r: usize,
) -> Result<DuprTrace, ConstructionError> {
    check_args(view, ego, r)?;
    let g = view.graph();
    require_ports(g, ports)?;
    let ego_types = layer1_ego_types(view, ego);
    let port_mult: BTreeMap<NodeId, Vec<((u32, EdgeTypeId), usize)>> = view
        .attributes()
        .map(|a| (a, multiset(g.in_edges(a).iter().map(|&e| (ports.p_in(e), g.edge(e).ty)))))
        .collect();

    let ov = view
        .entities()
        .map(|v| {
            let messages = multiset(g.out_edges(v).iter().map(|&e| {
                let edge = g.edge(e);
                (edge.ty, ports.p_in(e), &ego_types[&edge.dst], &port_mult[&edge.dst])
            }));
            let count = messages
                .iter()
                .filter(|((ty, _, types, _), _)| types.contains(ty))
                .map(|((ty, p, _, mult), n)| {
                    let m = mult.iter().find(|(k, _)| *k == (*p, *ty)).map_or(1, |(_, m)| *m);
                    n / m
                })
                .sum();
            (v, count)
        })
        .collect();

    finish(view, ego, r, ego_types, ov)
}

fn check_args(view: &EntityAttributeView<'_>, ego: NodeId, r: usize) -> Result<(), ConstructionError> {
    require_teag(view)?;
    view.check_entity(ego)?;
    if r == 0 {
        return Err(ConstructionError::ZeroThreshold);
    }
    Ok(())
}

/// Layer 1 (forward): each attribute keeps the edge types of ego-flagged
/// messages.
fn layer1_ego_types(view: &EntityAttributeView<'_>, ego: NodeId) -> BTreeMap<NodeId, Vec<EdgeTypeId>> {
    let g = view.graph();
    view.attributes()
        .map(|a| {
            let types: BTreeSet<EdgeTypeId> = g
                .in_edges(a)
                .iter()
                .map(|&e| g.edge(e))
                .filter(|edge| edge.src == ego)
                .map(|edge| edge.ty)
                .collect();
            (a, types.into_iter().collect())
        })
        .collect()
}

/// Layers 3 and 4.
fn finish(
    view: &EntityAttributeView<'_>,
    ego: NodeId,
    r: usize,
    ego_types: BTreeMap<NodeId, Vec<EdgeTypeId>>,
    ov: BTreeMap<NodeId, usize>,
) -> Result<DuprTrace, ConstructionError> {
    let g = view.graph();
    let sigma_star = g.node_type(ego);

    // The ego's type as carried by ego-flagged messages must be the ego's own.
    let carried: BTreeSet<NodeTypeId> = view
        .attributes()
        .flat_map(|a| g.in_edges(a).iter().map(|&e| g.edge(e).src))
        .filter(|&s| s == ego)
        .map(|s| g.node_type(s))
        .collect();
    if carried.iter().any(|&t| t != sigma_star) {
        return Err(ConstructionError::EgoTypeMismatch {
            ego,
            expected: g.node_type_name(sigma_star).to_owned(),
            found: carried.iter().map(|&t| g.node_type_name(t).to_owned()).collect(),
        });
    }

    // Layer 3 (forward): messages (ego bit, sender type, ov(sender)).
    let max_ov: BTreeMap<NodeId, usize> = view
        .attributes()
        .map(|a| {
            if ego_types[&a].is_empty() {
                return (a, 0);
            }
            let best = g
                .in_edges(a)
                .iter()
                .map(|&e| g.edge(e).src)
                .filter(|&s| s != ego && g.node_type(s) == sigma_star)
                .map(|s| ov[&s])
                .max()
                .unwrap_or(0);
            (a, best)
        })
        .collect();

    // Layer 4 (reverse): the ego reads maxOv from its attributes.
    let best = g.out_edges(ego).iter().map(|&e| max_ov[&g.edge(e).dst]).max().unwrap_or(0);
    Ok(DuprTrace { ego, r, ego_types, ov, max_ov, output: best >= r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{assign_canonical_ports, GraphBuilder, TypeKind, TypedMultigraph};

    /// u, v share a1, a2; w holds a2 only.
    fn sample() -> TypedMultigraph {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        let a = b.node_type("alpha", TypeKind::Attribute).unwrap();
        let t1 = b.edge_type("tau1").unwrap();
        let t2 = b.edge_type("tau2").unwrap();
        let (u, v, w) = (b.add_node(s).unwrap(), b.add_node(s).unwrap(), b.add_node(s).unwrap());
        let (a1, a2) = (b.add_node(a).unwrap(), b.add_node(a).unwrap());
        b.add_edge(u, a1, t1).unwrap();
        b.add_edge(u, a2, t2).unwrap();
        b.add_edge(v, a1, t1).unwrap();
        b.add_edge(v, a2, t2).unwrap();
        b.add_edge(w, a2, t1).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn trace_of_shared_pair() {
        let g = sample();
        let t = dupr_ego(&g.view(), 0, 2).unwrap();
        assert_eq!(t.ov, BTreeMap::from([(0, 2), (1, 2), (2, 0)]));
        assert_eq!(t.ego_types[&3], vec![EdgeTypeId(0)]);
        assert_eq!(t.max_ov, BTreeMap::from([(3, 2), (4, 2)]));
        assert!(t.output);
        assert!(!dupr_ego(&g.view(), 0, 3).unwrap().output);
        assert!(!dupr_ego(&g.view(), 2, 1).unwrap().output);
    }

    #[test]
    fn multigraph_variant_agrees_on_simple_graphs() {
        let g = sample();
        let p = assign_canonical_ports(&g);
        for ego in 0..3 {
            for r in 1..4 {
                assert_eq!(dupr_ego(&g.view(), ego, r).unwrap(), dupr_ego_multigraph(&g.view(), &p, ego, r).unwrap());
            }
        }
    }

    #[test]
    fn ego_without_attributes() {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        b.add_node(s).unwrap();
        let g = b.build().unwrap();
        let t = dupr_ego(&g.view(), 0, 2).unwrap();
        assert!(!t.output);
        assert_eq!(t.ov[&0], 0);
    }

    #[test]
    fn argument_errors() {
        let g = sample();
        assert_eq!(dupr_ego(&g.view(), 0, 0), Err(ConstructionError::ZeroThreshold));
        assert!(matches!(dupr_ego(&g.view(), 3, 1), Err(ConstructionError::Graph(_))));
    }

    #[test]
    fn parallel_edges_counted_once() {
        // u ⇉ a1 and v ⇉ a1: overlap 1.
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        let a = b.node_type("alpha", TypeKind::Attribute).unwrap();
        let t = b.edge_type("tau1").unwrap();
        let (u, v, x) = (b.add_node(s).unwrap(), b.add_node(s).unwrap(), b.add_node(a).unwrap());
        for src in [u, u, v, v] {
            b.add_edge(src, x, t).unwrap();
        }
        let g = b.build().unwrap();
        assert_eq!(dupr_ego(&g.view(), u, 1), Err(ConstructionError::NotSimple));
        let p = assign_canonical_ports(&g);
        let tr = dupr_ego_multigraph(&g.view(), &p, u, 1).unwrap();
        assert_eq!(tr.ov[&v], 1);
        assert!(tr.output);
        assert!(!dupr_ego_multigraph(&g.view(), &p, u, 2).unwrap().output);
    }
}
