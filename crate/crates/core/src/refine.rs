//! Color refinement aware of the message-passing adaptations.
//!
//! Several graphs are refined jointly against one label dictionary, so a label
//! means the same thing in every graph of the run. Layer 0 colors a node by its
//! type name (and its ego bit when ego ids are on). Layer `k` colors a node by
//! its layer `k-1` color together with the sorted multiset of incoming message
//! keys and, when reverse message passing is on, a separate sorted multiset of
//! outgoing message keys. A message key is the neighbor's color, the edge type
//! name and whichever port numbers the configuration exposes.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{GraphError, NodeId, PortAssignment, TypedMultigraph};
use crate::AdaptationSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RefineError {
    #[error("graph {0}: ports are required by the configuration")]
    MissingPorts(usize),
    #[error("graph {0}: ego ids are enabled but no ego node was given")]
    MissingEgo(usize),
    #[error("graph {0}: an ego node was given but ego ids are disabled")]
    UnexpectedEgo(usize),
    #[error("graph {index}: {source}")]
    Graph { index: usize, source: GraphError },
}

/// One graph taking part in a joint refinement.
#[derive(Debug, Clone, Copy)]
pub struct RefineInput<'a> {
    pub graph: &'a TypedMultigraph,
    pub ports: Option<&'a PortAssignment>,
    pub ego: Option<NodeId>,
}

impl<'a> RefineInput<'a> {
    pub fn new(graph: &'a TypedMultigraph) -> Self {
        Self { graph, ports: None, ego: None }
    }

    pub fn with_ports(mut self, ports: Option<&'a PortAssignment>) -> Self {
        self.ports = ports;
        self
    }

    pub fn with_ego(mut self, ego: Option<NodeId>) -> Self {
        self.ego = ego;
        self
    }
}

/// Labels per layer per node. `layers[k][v]` is the color of `v` after `k`
/// rounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColorAssignment {
    pub layers: Vec<Vec<u32>>,
}

impl ColorAssignment {
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn color(&self, layer: usize, v: NodeId) -> u32 {
        self.layers[layer][v]
    }

    /// Number of color classes at each layer.
    pub fn partition_sizes(&self) -> Vec<usize> {
        self.layers
            .iter()
            .map(|l| l.iter().collect::<BTreeSet<_>>().len())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct MessageKey {
    color: u32,
    edge_type: u32,
    p_in: Option<u32>,
    p_out: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Signature {
    Initial { node_type: u32, ego: Option<bool> },
    Step { prev: u32, incoming: Vec<MessageKey>, outgoing: Option<Vec<MessageKey>> },
}

struct Interner<K> {
    ids: HashMap<K, u32>,
}

impl<K> Default for Interner<K> {
    fn default() -> Self {
        Self { ids: HashMap::new() }
    }
}

impl<K: std::hash::Hash + Eq> Interner<K> {
    fn id(&mut self, key: K) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(next)
    }
}

fn check_inputs(inputs: &[RefineInput<'_>], config: AdaptationSet) -> Result<(), RefineError> {
    for (index, input) in inputs.iter().enumerate() {
        if config.uses_ports() {
            let ports = input.ports.ok_or(RefineError::MissingPorts(index))?;
            ports
                .check_covers(input.graph)
                .map_err(|source| RefineError::Graph { index, source })?;
        }
        match (config.ego_ids, input.ego) {
            (true, None) => return Err(RefineError::MissingEgo(index)),
            (false, Some(_)) => return Err(RefineError::UnexpectedEgo(index)),
            (true, Some(v)) => input
                .graph
                .check_node(v)
                .map_err(|source| RefineError::Graph { index, source })?,
            (false, None) => {}
        }
    }
    Ok(())
}

/// Refine all `inputs` together for `depth` rounds.
pub fn refine_joint(
    inputs: &[RefineInput<'_>],
    config: AdaptationSet,
    depth: usize,
) -> Result<Vec<ColorAssignment>, RefineError> {
    check_inputs(inputs, config)?;

    let mut names: Interner<String> = Interner::default();
    let node_types: Vec<Vec<u32>> = inputs
        .iter()
        .map(|i| i.graph.nodes().map(|v| names.id(i.graph.node_type_def(v).name.clone())).collect())
        .collect();
    let mut edge_names: Interner<String> = Interner::default();
    let edge_types: Vec<Vec<u32>> = inputs
        .iter()
        .map(|i| i.graph.edges().iter().map(|e| edge_names.id(i.graph.edge_type_name(e.ty).to_owned())).collect())
        .collect();

    let mut dict: Interner<Signature> = Interner::default();
    let mut current: Vec<Vec<u32>> = inputs
        .iter()
        .zip(&node_types)
        .map(|(input, types)| {
            input
                .graph
                .nodes()
                .map(|v| {
                    let ego = config.ego_ids.then(|| input.ego == Some(v));
                    dict.id(Signature::Initial { node_type: types[v], ego })
                })
                .collect()
        })
        .collect();
    let mut history: Vec<Vec<Vec<u32>>> = current.iter().map(|c| vec![c.clone()]).collect();

    for _ in 0..depth {
        let mut next = Vec::with_capacity(inputs.len());
        for (gi, input) in inputs.iter().enumerate() {
            let g = input.graph;
            let colors = &current[gi];
            let key = |e: usize, nbr: NodeId| {
                let ports = input.ports.filter(|_| config.uses_ports());
                MessageKey {
                    color: colors[nbr],
                    edge_type: edge_types[gi][e],
                    p_in: ports.filter(|_| config.in_ports).map(|p| p.p_in(e)),
                    p_out: ports.filter(|_| config.out_ports).map(|p| p.p_out(e)),
                }
            };
            let layer: Vec<u32> = g
                .nodes()
                .map(|v| {
                    let mut incoming: Vec<_> =
                        g.in_edges(v).iter().map(|&e| key(e, g.edge(e).src)).collect();
                    incoming.sort_unstable();
                    let outgoing = config.reverse_mp.then(|| {
                        let mut out: Vec<_> =
                            g.out_edges(v).iter().map(|&e| key(e, g.edge(e).dst)).collect();
                        out.sort_unstable();
                        out
                    });
                    dict.id(Signature::Step { prev: colors[v], incoming, outgoing })
                })
                .collect();
            next.push(layer);
        }
        for (h, layer) in history.iter_mut().zip(&next) {
            h.push(layer.clone());
        }
        current = next;
    }
    Ok(history.into_iter().map(|layers| ColorAssignment { layers }).collect())
}

/// Refine a single graph.
pub fn refine(
    graph: &TypedMultigraph,
    ports: Option<&PortAssignment>,
    config: AdaptationSet,
    depth: usize,
    ego: Option<NodeId>,
) -> Result<ColorAssignment, RefineError> {
    let input = RefineInput { graph, ports, ego };
    Ok(refine_joint(&[input], config, depth)?.remove(0))
}

/// A node in a graph, with the ports used when the configuration needs them.
#[derive(Debug, Clone, Copy)]
pub struct Probe<'a> {
    pub graph: &'a TypedMultigraph,
    pub ports: Option<&'a PortAssignment>,
    pub node: NodeId,
}

/// Joint refinement of two probes, with the ego (if enabled) on each probe's
/// node. Returns the target colors at every layer `0..=depth`.
pub fn compare(
    a: Probe<'_>,
    b: Probe<'_>,
    config: AdaptationSet,
    depth: usize,
) -> Result<Comparison, RefineError> {
    let ego = |p: &Probe<'_>| config.ego_ids.then_some(p.node);
    let inputs = [
        RefineInput { graph: a.graph, ports: a.ports, ego: ego(&a) },
        RefineInput { graph: b.graph, ports: b.ports, ego: ego(&b) },
    ];
    for (index, p) in [a, b].iter().enumerate() {
        p.graph.check_node(p.node).map_err(|source| RefineError::Graph { index, source })?;
    }
    let colors = refine_joint(&inputs, config, depth)?;
    let equal_at = (0..=depth).map(|k| colors[0].color(k, a.node) == colors[1].color(k, b.node)).collect();
    Ok(Comparison {
        equal_at,
        partition_sizes: [colors[0].partition_sizes(), colors[1].partition_sizes()],
    })
}

/// Per-layer outcome of [`compare`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    /// `equal_at[k]`: the two targets share a color after `k` rounds.
    pub equal_at: Vec<bool>,
    pub partition_sizes: [Vec<usize>; 2],
}

impl Comparison {
    pub fn indistinguishable_at(&self, depth: usize) -> bool {
        self.equal_at[depth]
    }

    /// Smallest depth at which the targets separate, if any.
    pub fn first_separation(&self) -> Option<usize> {
        self.equal_at.iter().position(|&eq| !eq)
    }
}

/// True iff the depth-`depth` colors of the two probes coincide.
pub fn indistinguishable(
    a: Probe<'_>,
    b: Probe<'_>,
    config: AdaptationSet,
    depth: usize,
) -> Result<bool, RefineError> {
    Ok(compare(a, b, config, depth)?.indistinguishable_at(depth))
}
