//! A numeric message-passing network with random, untrained weights.
//!
//! `h0(v) = W_enc [type one-hot ; ego bit] + b_enc`, then for each layer
//!
//! ```text
//! h_k(v) = relu(W_self h_{k-1}(v) + W_in Σ m_in + W_out Σ m_out + b)
//! ```
//!
//! where a message is `[h_{k-1}(sender) ; edge-type one-hot ; p_in one-hot ;
//! p_out one-hot]`, port slots are zero unless the matching flag is on, and the
//! outgoing sum only exists with reverse message passing.
//!
//! Messages are summed in ascending lexicographic order of their values, so two
//! nodes receiving the same multiset of message vectors get bit-identical sums
//! regardless of edge ids or node ids.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, PortAssignment, TypedMultigraph};
use crate::AdaptationSet;

pub type Embedding = Vec<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MpnnError {
    #[error("ports are required by the configuration")]
    MissingPorts,
    #[error("port assignment covers {got} edges, graph has {expected}")]
    PortCountMismatch { expected: usize, got: usize },
    #[error("ego ids are enabled but no ego node was given")]
    MissingEgo,
    #[error("an ego node was given but ego ids are disabled")]
    UnexpectedEgo,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node type {0:?} is not in the feature space")]
    UnknownNodeType(String),
    #[error("edge type {0:?} is not in the feature space")]
    UnknownEdgeType(String),
    #[error("non-finite value at layer {layer}, node {node}")]
    NonFinite { layer: usize, node: NodeId },
    #[error("embedding dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("hidden_dim and depth must be at least 1")]
    EmptyShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub hidden_dim: usize,
    pub depth: usize,
    pub adaptations: AdaptationSet,
    pub seed: u64,
}

impl EngineConfig {
    pub fn new(depth: usize, adaptations: AdaptationSet, seed: u64) -> Self {
        Self { hidden_dim: 32, depth, adaptations, seed }
    }
}

/// Input feature catalog shared by every graph run through one set of weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureSpace {
    pub node_types: Vec<String>,
    pub edge_types: Vec<String>,
    /// Number of incoming-port slots; larger port numbers use the last slot.
    pub in_width: usize,
    /// Number of outgoing-port slots; larger port numbers use the last slot.
    pub out_width: usize,
}

impl FeatureSpace {
    /// Type names in first-seen order; port widths are the largest in- and
    /// out-degree over all graphs.
    pub fn joint(graphs: &[&TypedMultigraph]) -> Self {
        let mut node_types: Vec<String> = Vec::new();
        let mut edge_types: Vec<String> = Vec::new();
        for g in graphs {
            for t in g.node_types() {
                if !node_types.contains(&t.name) {
                    node_types.push(t.name.clone());
                }
            }
            for t in g.edge_types() {
                if !edge_types.contains(t) {
                    edge_types.push(t.clone());
                }
            }
        }
        Self {
            node_types,
            edge_types,
            in_width: graphs.iter().map(|g| g.max_in_degree()).max().unwrap_or(0),
            out_width: graphs.iter().map(|g| g.max_out_degree()).max().unwrap_or(0),
        }
    }

    fn input_width(&self) -> usize {
        self.node_types.len() + 1
    }

    fn message_width(&self, hidden: usize) -> usize {
        hidden + self.edge_types.len() + self.in_width + self.out_width
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    fn uniform(rows: usize, cols: usize, bound: f64, rng: &mut ChaCha8Rng) -> Self {
        let data = (0..rows * cols).map(|_| rng.random_range(-bound..=bound)).collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// `out += self * x`.
    fn mul_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            *o += row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub w_self: Matrix,
    pub w_in: Matrix,
    pub w_out: Option<Matrix>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights {
    pub config: EngineConfig,
    pub features: FeatureSpace,
    pub w_enc: Matrix,
    pub b_enc: Vec<f64>,
    pub layers: Vec<Layer>,
}

fn bound(fan_in: usize) -> f64 {
    1.0 / (fan_in.max(1) as f64).sqrt()
}

/// Draw every weight uniformly on `[-1/√fan_in, 1/√fan_in]` from a ChaCha8
/// stream seeded with `config.seed`. Biases use the fan-in of their layer's
/// self map (the encoder's input width for `b_enc`).
pub fn init_weights(config: &EngineConfig, features: &FeatureSpace) -> Result<LayerWeights, MpnnError> {
    if config.hidden_dim == 0 || config.depth == 0 {
        return Err(MpnnError::EmptyShape);
    }
    let d = config.hidden_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let fin = features.input_width();
    let w_enc = Matrix::uniform(d, fin, bound(fin), &mut rng);
    let b_enc = (0..d).map(|_| rng.random_range(-bound(fin)..=bound(fin))).collect();
    let m = features.message_width(d);
    let layers = (0..config.depth)
        .map(|_| {
            let w_self = Matrix::uniform(d, d, bound(d), &mut rng);
            let w_in = Matrix::uniform(d, m, bound(m), &mut rng);
            let w_out = config.adaptations.reverse_mp.then(|| Matrix::uniform(d, m, bound(m), &mut rng));
            let bias = (0..d).map(|_| rng.random_range(-bound(d)..=bound(d))).collect();
            Layer { w_self, w_in, w_out, bias }
        })
        .collect();
    Ok(LayerWeights { config: *config, features: features.clone(), w_enc, b_enc, layers })
}

/// Embeddings of every node at every layer: `layers[k][v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub layers: Vec<Vec<Embedding>>,
}

impl Trajectory {
    pub fn last(&self) -> &[Embedding] {
        self.layers.last().expect("layer 0 always exists")
    }

    pub fn at(&self, layer: usize, v: NodeId) -> &Embedding {
        &self.layers[layer][v]
    }
}

fn one_hot_into(buf: &mut [f64], value: u32) {
    if buf.is_empty() || value == 0 {
        return;
    }
    let slot = (value as usize - 1).min(buf.len() - 1);
    buf[slot] = 1.0;
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Sum equal-length vectors in ascending lexicographic order.
fn canonical_sum(mut messages: Vec<Vec<f64>>, width: usize) -> Vec<f64> {
    messages.sort_by(|a, b| lex_cmp(a, b));
    let mut sum = vec![0.0; width];
    for m in &messages {
        for (s, x) in sum.iter_mut().zip(m) {
            *s += x;
        }
    }
    sum
}

pub fn forward(
    graph: &TypedMultigraph,
    ports: Option<&PortAssignment>,
    weights: &LayerWeights,
    ego: Option<NodeId>,
) -> Result<Trajectory, MpnnError> {
    let cfg = weights.config.adaptations;
    let fs = &weights.features;
    let d = weights.config.hidden_dim;

    let ports = if cfg.uses_ports() {
        let p = ports.ok_or(MpnnError::MissingPorts)?;
        if p.len() != graph.edge_count() {
            return Err(MpnnError::PortCountMismatch { expected: graph.edge_count(), got: p.len() });
        }
        Some(p)
    } else {
        None
    };
    let ego = match (cfg.ego_ids, ego) {
        (true, None) => return Err(MpnnError::MissingEgo),
        (false, Some(_)) => return Err(MpnnError::UnexpectedEgo),
        (true, Some(v)) if !graph.contains_node(v) => return Err(MpnnError::UnknownNode(v)),
        (_, ego) => ego,
    };

    let node_slot: Vec<usize> = graph
        .node_types()
        .iter()
        .map(|t| {
            fs.node_types
                .iter()
                .position(|n| *n == t.name)
                .ok_or_else(|| MpnnError::UnknownNodeType(t.name.clone()))
        })
        .collect::<Result<_, _>>()?;
    let edge_slot: Vec<usize> = graph
        .edge_types()
        .iter()
        .map(|t| fs.edge_types.iter().position(|n| n == t).ok_or_else(|| MpnnError::UnknownEdgeType(t.clone())))
        .collect::<Result<_, _>>()?;

    // Per-edge static features: edge-type and port one-hots.
    let static_width = fs.edge_types.len() + fs.in_width + fs.out_width;
    let edge_features: Vec<Vec<f64>> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let mut f = vec![0.0; static_width];
            f[edge_slot[edge.ty.index()]] = 1.0;
            let (pin, pout) = f[fs.edge_types.len()..].split_at_mut(fs.in_width);
            if let Some(p) = ports {
                if cfg.in_ports {
                    one_hot_into(pin, p.p_in(e));
                }
                if cfg.out_ports {
                    one_hot_into(pout, p.p_out(e));
                }
            }
            f
        })
        .collect();

    let h0: Vec<Embedding> = graph
        .nodes()
        .map(|v| {
            let mut x = vec![0.0; fs.input_width()];
            x[node_slot[graph.node_type(v).index()]] = 1.0;
            if ego == Some(v) {
                x[fs.node_types.len()] = 1.0;
            }
            let mut h = weights.b_enc.clone();
            weights.w_enc.mul_add(&x, &mut h);
            h
        })
        .collect();
    check_finite(&h0, 0)?;

    let m = fs.message_width(d);
    let message = |h: &[Embedding], e: usize, sender: NodeId| {
        let mut msg = Vec::with_capacity(m);
        msg.extend_from_slice(&h[sender]);
        msg.extend_from_slice(&edge_features[e]);
        msg
    };

    let mut layers = vec![h0];
    for (k, layer) in weights.layers.iter().enumerate() {
        let h = &layers[k];
        let next: Vec<Embedding> = graph
            .nodes()
            .map(|v| {
                let mut out = layer.bias.clone();
                layer.w_self.mul_add(&h[v], &mut out);
                let incoming: Vec<_> =
                    graph.in_edges(v).iter().map(|&e| message(h, e, graph.edge(e).src)).collect();
                layer.w_in.mul_add(&canonical_sum(incoming, m), &mut out);
                if let Some(w_out) = &layer.w_out {
                    let outgoing: Vec<_> =
                        graph.out_edges(v).iter().map(|&e| message(h, e, graph.edge(e).dst)).collect();
                    w_out.mul_add(&canonical_sum(outgoing, m), &mut out);
                }
                out.iter_mut().for_each(|x| *x = x.max(0.0));
                out
            })
            .collect();
        check_finite(&next, k + 1)?;
        layers.push(next);
    }
    Ok(Trajectory { layers })
}

fn check_finite(layer: &[Embedding], k: usize) -> Result<(), MpnnError> {
    match layer.iter().position(|h| h.iter().any(|x| !x.is_finite())) {
        Some(node) => Err(MpnnError::NonFinite { layer: k, node }),
        None => Ok(()),
    }
}

/// Euclidean distance.
pub fn embedding_distance(a: &[f64], b: &[f64]) -> Result<f64, MpnnError> {
    if a.len() != b.len() {
        return Err(MpnnError::DimensionMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{assign_canonical_ports, GraphBuilder, TypeKind};

    fn fan_in(sources: usize) -> TypedMultigraph {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        let a = b.node_type("alpha1", TypeKind::Attribute).unwrap();
        let t = b.edge_type("tau1").unwrap();
        let srcs: Vec<_> = (0..sources).map(|_| b.add_node(s).unwrap()).collect();
        let x = b.add_node(a).unwrap();
        for u in srcs {
            b.add_edge(u, x, t).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn same_seed_same_weights() {
        let g = fan_in(2);
        let fs = FeatureSpace::joint(&[&g]);
        let cfg = EngineConfig::new(2, AdaptationSet::reverse(), 7);
        assert_eq!(init_weights(&cfg, &fs).unwrap(), init_weights(&cfg, &fs).unwrap());
        let other = EngineConfig { seed: 8, ..cfg };
        assert_ne!(init_weights(&cfg, &fs).unwrap(), init_weights(&other, &fs).unwrap());
    }

    #[test]
    fn unit_shape_bounds() {
        let fs = FeatureSpace { node_types: vec![], edge_types: vec![], in_width: 0, out_width: 0 };
        let cfg = EngineConfig { hidden_dim: 1, depth: 1, adaptations: AdaptationSet::NONE, seed: 3 };
        let w = init_weights(&cfg, &fs).unwrap();
        assert!(w.layers[0].w_self.values().iter().all(|x| x.abs() <= 1.0));
        assert!(w.w_enc.values().iter().all(|x| x.abs() <= 1.0));
        assert_eq!(
            init_weights(&EngineConfig { depth: 0, ..cfg }, &fs),
            Err(MpnnError::EmptyShape)
        );
    }

    #[test]
    fn forward_only_target_matches_across_pair() {
        let (g1, g2) = (fan_in(2), fan_in(1));
        let fs = FeatureSpace::joint(&[&g1, &g2]);
        for seed in 0..5 {
            let w = init_weights(&EngineConfig::new(3, AdaptationSet::NONE, seed), &fs).unwrap();
            let t1 = forward(&g1, None, &w, None).unwrap();
            let t2 = forward(&g2, None, &w, None).unwrap();
            for k in 0..=3 {
                assert_eq!(t1.at(k, 0), t2.at(k, 0));
            }
        }
    }

    #[test]
    fn reverse_separates_the_pair() {
        let (g1, g2) = (fan_in(2), fan_in(1));
        let fs = FeatureSpace::joint(&[&g1, &g2]);
        let w = init_weights(&EngineConfig::new(2, AdaptationSet::reverse(), 0), &fs).unwrap();
        let t1 = forward(&g1, None, &w, None).unwrap();
        let t2 = forward(&g2, None, &w, None).unwrap();
        assert_eq!(t1.at(1, 0), t2.at(1, 0));
        assert!(embedding_distance(t1.at(2, 0), t2.at(2, 0)).unwrap() > 0.0);
    }

    #[test]
    fn isolated_node_depends_only_on_type() {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        b.add_node(s).unwrap();
        let lone = b.build().unwrap();
        let g = fan_in(1);
        let fs = FeatureSpace::joint(&[&g, &lone]);
        let cfg = EngineConfig::new(2, AdaptationSet::NONE, 1);
        let w = init_weights(&cfg, &fs).unwrap();
        let a = forward(&lone, None, &w, None).unwrap();
        let b = forward(&g, None, &w, None).unwrap();
        assert_eq!(a.at(2, 0), b.at(2, 0));
    }

    #[test]
    fn configuration_errors() {
        let g = fan_in(2);
        let fs = FeatureSpace::joint(&[&g]);
        let w = init_weights(&EngineConfig::new(1, AdaptationSet::NONE.with_in_ports(), 0), &fs).unwrap();
        assert_eq!(forward(&g, None, &w, None), Err(MpnnError::MissingPorts));
        let p = assign_canonical_ports(&g);
        assert!(forward(&g, Some(&p), &w, None).is_ok());
        let w = init_weights(&EngineConfig::new(1, AdaptationSet::NONE.with_ego(), 0), &fs).unwrap();
        assert_eq!(forward(&g, None, &w, None), Err(MpnnError::MissingEgo));
        assert_eq!(forward(&g, None, &w, Some(9)), Err(MpnnError::UnknownNode(9)));
    }

    #[test]
    fn distances() {
        assert_eq!(embedding_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(embedding_distance(&[1.5], &[1.5]).unwrap(), 0.0);
        assert_eq!(embedding_distance(&[1.0], &[1.0, 2.0]), Err(MpnnError::DimensionMismatch(1, 2)));
    }

    #[test]
    fn oversized_ports_clamp_to_last_slot() {
        let mut buf = vec![0.0; 2];
        one_hot_into(&mut buf, 5);
        assert_eq!(buf, vec![0.0, 1.0]);
    }
}
