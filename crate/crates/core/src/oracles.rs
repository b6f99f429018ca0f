//! Brute-force ground truth for the duplicate, cycle and walk predicates.
//!
//! Nothing here shares code with the message-passing constructions: these are
//! direct set computations and exhaustive searches, kept deliberately naive so
//! they can serve as the reference the constructions are checked against.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{EntityAttributeView, GraphError, NodeId, TypedMultigraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("similarity {sim} for ({a}, {b}) is outside [0, 1]")]
    SimilarityOutOfRange { a: NodeId, b: NodeId, sim: f64 },
    #[error("self-similarity of attribute {0} must be 1")]
    DiagonalNotOne(NodeId),
}

/// Symmetric attribute similarity with identity defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimilarityTable {
    entries: HashMap<(NodeId, NodeId), f64>,
}

impl SimilarityTable {
    /// `sim(a, a') = 1[a = a']`.
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn set(&mut self, a: NodeId, b: NodeId, sim: f64) -> Result<(), OracleError> {
        if !(0.0..=1.0).contains(&sim) {
            return Err(OracleError::SimilarityOutOfRange { a, b, sim });
        }
        if a == b {
            return if sim == 1.0 { Ok(()) } else { Err(OracleError::DiagonalNotOne(a)) };
        }
        self.entries.insert((a.min(b), a.max(b)), sim);
        Ok(())
    }

    pub fn get(&self, a: NodeId, b: NodeId) -> f64 {
        if a == b {
            return 1.0;
        }
        self.entries.get(&(a.min(b), a.max(b))).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `|N_typed(u) ∩ N_typed(v)|`.
pub fn overlap(view: &EntityAttributeView<'_>, u: NodeId, v: NodeId) -> Result<usize, OracleError> {
    let nu = view.typed_neighborhood(u)?;
    let nv = view.typed_neighborhood(v)?;
    Ok(nu.intersection(&nv).count())
}

/// Does some other entity of `u`'s type share at least `r` typed attributes
/// with `u`?
pub fn dup_r(view: &EntityAttributeView<'_>, u: NodeId, r: usize) -> Result<bool, OracleError> {
    view.check_entity(u)?;
    let graph = view.graph();
    let ty = graph.node_type(u);
    for v in view.entities() {
        if v != u && graph.node_type(v) == ty && overlap(view, u, v)? >= r {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Soft overlap: for each `(a, τ)` of `u`, the best similarity against any
/// same-typed-edge attribute of `v` (0 when there is none), summed.
pub fn soft_overlap(
    view: &EntityAttributeView<'_>,
    u: NodeId,
    v: NodeId,
    sims: &SimilarityTable,
) -> Result<f64, OracleError> {
    let nu = view.typed_neighborhood(u)?;
    let nv = view.typed_neighborhood(v)?;
    Ok(nu
        .iter()
        .map(|&(a, ty)| {
            nv.iter()
                .filter(|&&(_, ty2)| ty2 == ty)
                .map(|&(b, _)| sims.get(a, b))
                .fold(0.0, f64::max)
        })
        .sum())
}

/// Does `v` lie on a directed simple cycle through exactly `len` distinct
/// vertices? Edge types along the cycle may differ.
///
/// Exhaustive depth-bounded simple-path search from `v`. `len = 1` asks for a
/// self-loop, `len = 2` for a 2-cycle; `len = 0` is never satisfied.
pub fn cyc(graph: &TypedMultigraph, v: NodeId, len: usize) -> Result<bool, OracleError> {
    graph.check_node(v)?;
    if len == 0 {
        return Ok(false);
    }
    let succ: Vec<Vec<NodeId>> = graph.nodes().map(|x| graph.successors(x)).collect();
    let mut on_path = vec![false; graph.node_count()];
    on_path[v] = true;
    Ok(simple_path_closes(&succ, v, v, 1, len, &mut on_path))
}

fn simple_path_closes(
    succ: &[Vec<NodeId>],
    start: NodeId,
    at: NodeId,
    vertices: usize,
    len: usize,
    on_path: &mut [bool],
) -> bool {
    if vertices == len {
        return succ[at].contains(&start);
    }
    for &next in &succ[at] {
        if on_path[next] {
            continue;
        }
        on_path[next] = true;
        let found = simple_path_closes(succ, start, next, vertices + 1, len, on_path);
        on_path[next] = false;
        if found {
            return true;
        }
    }
    false
}

/// Is there a directed walk of exactly `len` edges from `v` back to `v`?
/// Vertices may repeat. Computed by boolean frontier propagation.
pub fn closed_walk(graph: &TypedMultigraph, v: NodeId, len: usize) -> Result<bool, OracleError> {
    graph.check_node(v)?;
    let mut frontier = vec![false; graph.node_count()];
    frontier[v] = true;
    for _ in 0..len {
        let mut next = vec![false; graph.node_count()];
        for e in graph.edges() {
            if frontier[e.src] {
                next[e.dst] = true;
            }
        }
        frontier = next;
    }
    Ok(frontier[v])
}
