use std::collections::BTreeSet;

use super::{multiset, require_ports, require_teag, ConstructionError, EntityOutputs};
use crate::graph::{EdgeTypeId, EntityAttributeView, NodeTypeId, PortAssignment};

/// Two-layer `Dup_1` detector for simple graphs.
///
/// Layer 1 (forward): each attribute collects the multiset `M(a)` of
/// `(sender type, edge type)` pairs. Layer 2 (reverse): each entity reads
/// `(τ, M(a))` from its attributes and fires if some `M(a)` holds its own
/// `(type, τ)` at least twice.
pub fn dup1_simple(view: &EntityAttributeView<'_>) -> Result<EntityOutputs, ConstructionError> {
    require_teag(view)?;
    if !view.is_simple() {
        return Err(ConstructionError::NotSimple);
    }
    let g = view.graph();

    let summary: Vec<Vec<((NodeTypeId, EdgeTypeId), usize)>> = g
        .nodes()
        .map(|a| {
            multiset(g.in_edges(a).iter().map(|&e| {
                let edge = g.edge(e);
                (g.node_type(edge.src), edge.ty)
            }))
        })
        .collect();

    Ok(view
        .entities()
        .map(|u| {
            let sigma = g.node_type(u);
            let fires = g.out_edges(u).iter().any(|&e| {
                let edge = g.edge(e);
                let m = &summary[edge.dst];
                m.binary_search_by(|(k, _)| k.cmp(&(sigma, edge.ty)))
                    .map(|i| m[i].1 >= 2)
                    .unwrap_or(false)
            });
            (u, fires)
        })
        .collect())
}

/// Two-layer `Dup_1` detector for multigraphs, using incoming ports.
///
/// Layer 1: each attribute collects `(sender type, edge type, p_in)` messages
/// and keeps, per `(sender type, edge type)`, the number of distinct `p_in`
/// values (`dsrc`). Parallel edges share a port, distinct sources do not, so
/// `dsrc` counts distinct senders. Layer 2 fires if some attribute of `u` has
/// `dsrc(type(u), τ) >= 2`.
pub fn dup1_multigraph(
    view: &EntityAttributeView<'_>,
    ports: &PortAssignment,
) -> Result<EntityOutputs, ConstructionError> {
    require_teag(view)?;
    let g = view.graph();
    require_ports(g, ports)?;

    let dsrc: Vec<Vec<((NodeTypeId, EdgeTypeId), usize)>> = g
        .nodes()
        .map(|a| {
            let messages = multiset(g.in_edges(a).iter().map(|&e| {
                let edge = g.edge(e);
                (g.node_type(edge.src), edge.ty, ports.p_in(e))
            }));
            let mut distinct: std::collections::BTreeMap<(NodeTypeId, EdgeTypeId), BTreeSet<u32>> =
                Default::default();
            for ((sigma, ty, p), _) in messages {
                distinct.entry((sigma, ty)).or_default().insert(p);
            }
            distinct.into_iter().map(|(k, set)| (k, set.len())).collect()
        })
        .collect();

    Ok(view
        .entities()
        .map(|u| {
            let sigma = g.node_type(u);
            let fires = g.out_edges(u).iter().any(|&e| {
                let edge = g.edge(e);
                dsrc[edge.dst].iter().any(|&(k, n)| k == (sigma, edge.ty) && n >= 2)
            });
            (u, fires)
        })
        .collect())
}
