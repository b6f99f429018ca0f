use serde::Serialize;

use super::ConstructionError;
use crate::graph::{NodeId, TypedMultigraph};

/// Per-layer walk flags of [`cyc_ego`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycTrace {
    pub ego: NodeId,
    pub ell: usize,
    /// `flags[k][v]`: some directed walk of exactly `k` edges runs from the ego
    /// to `v`.
    pub flags: Vec<Vec<bool>>,
    pub output: bool,
}

/// `ℓ`-layer forward-only detector with an ego bit.
///
/// `flag_0` is the ego bit; `flag_k(v)` is the OR of `flag_{k-1}` over the
/// senders of `v`'s incoming messages. The readout `flag_ℓ(ego)` reports a
/// closed walk of length `ℓ`, which coincides with a simple `ℓ`-cycle only
/// when the graph is functional.
pub fn cyc_ego(graph: &TypedMultigraph, ego: NodeId, ell: usize) -> Result<CycTrace, ConstructionError> {
    graph.check_node(ego)?;
    let mut flags = vec![graph.nodes().map(|v| v == ego).collect::<Vec<_>>()];
    for k in 0..ell {
        let prev = &flags[k];
        let next = graph
            .nodes()
            .map(|v| graph.in_edges(v).iter().any(|&e| prev[graph.edge(e).src]))
            .collect();
        flags.push(next);
    }
    let output = flags[ell][ego];
    Ok(CycTrace { ego, ell, flags, output })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphBuilder, TypeKind};

    fn cycles(lengths: &[usize]) -> TypedMultigraph {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Plain).unwrap();
        let t = b.edge_type("tau1").unwrap();
        let mut base = 0;
        for &l in lengths {
            for _ in 0..l {
                b.add_node(s).unwrap();
            }
            for i in 0..l {
                b.add_edge(base + i, base + (i + 1) % l, t).unwrap();
            }
            base += l;
        }
        b.build().unwrap()
    }

    #[test]
    fn two_triangles_versus_hexagon() {
        assert!(cyc_ego(&cycles(&[3, 3]), 0, 3).unwrap().output);
        assert!(!cyc_ego(&cycles(&[6]), 0, 3).unwrap().output);
    }

    #[test]
    fn triangle_walks_twice_around() {
        let t = cyc_ego(&cycles(&[3]), 0, 6).unwrap();
        assert!(t.output);
        assert_eq!(t.flags.len(), 7);
        assert_eq!(t.flags[1], vec![false, true, false]);
    }

    #[test]
    fn path_never_returns() {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Plain).unwrap();
        let t = b.edge_type("tau1").unwrap();
        for _ in 0..3 {
            b.add_node(s).unwrap();
        }
        b.add_edge(0, 1, t).unwrap();
        b.add_edge(1, 2, t).unwrap();
        let g = b.build().unwrap();
        assert!(!cyc_ego(&g, 0, 3).unwrap().output);
        assert!(cyc_ego(&g, 5, 3).is_err());
    }
}
