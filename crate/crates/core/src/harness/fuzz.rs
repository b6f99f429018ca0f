use std::collections::BTreeMap;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{HarnessError, Verdict};
use crate::constructions::{
    cyc_ego, dup1_multigraph, dup1_simple, dupr_ego, dupr_ego_multigraph, ConstructionError,
};
use crate::format::GraphFile;
use crate::graph::{
    assign_canonical_ports, validate_ports, EdgeTypeId, GraphBuilder, NodeId, NodeTypeId, PortAssignment, Ports,
    TypeKind, TypedMultigraph,
};
use crate::oracles::{closed_walk, cyc, dup_r, overlap, soft_overlap, SimilarityTable};

/// Size limits for generated graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzBounds {
    pub max_entities: usize,
    pub max_attributes: usize,
    pub max_entity_types: usize,
    pub max_edge_types: usize,
    /// Largest number of parallel edges per `(entity, attribute, type)`.
    pub max_parallel: usize,
    /// Node count for plain digraphs and functional graphs.
    pub max_nodes: usize,
    /// Largest walk or cycle length checked.
    pub max_ell: usize,
}

impl Default for FuzzBounds {
    fn default() -> Self {
        Self {
            max_entities: 8,
            max_attributes: 10,
            max_entity_types: 3,
            max_edge_types: 3,
            max_parallel: 2,
            max_nodes: 8,
            max_ell: 8,
        }
    }
}

impl FuzzBounds {
    fn check(&self) -> Result<(), HarnessError> {
        let limits = [
            ("max_entities", self.max_entities, 8),
            ("max_attributes", self.max_attributes, 10),
            ("max_entity_types", self.max_entity_types, 3),
            ("max_edge_types", self.max_edge_types, 3),
            ("max_parallel", self.max_parallel, 2),
            ("max_nodes", self.max_nodes, 8),
            ("max_ell", self.max_ell, 8),
        ];
        for (name, value, limit) in limits {
            if value == 0 || value > limit {
                return Err(HarnessError::InvalidParameter(format!(
                    "{name} = {value} is outside 1..={limit}, where the oracles stay tractable"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzOptions {
    pub seed: u64,
    /// Graphs generated per family.
    pub n_graphs: usize,
    /// Random valid port assignments tried per multigraph.
    pub port_assignments: usize,
    pub bounds: FuzzBounds,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        Self { seed: 0, n_graphs: 500, port_assignments: 3, bounds: FuzzBounds::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: String,
    pub comparisons: usize,
    /// Comparisons whose expected value was `true`.
    pub positives: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub family: String,
    pub case: usize,
    pub inputs: Value,
    pub expected: Value,
    pub got: Value,
    pub graph: GraphFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub kind: String,
    pub options: FuzzOptions,
    pub checks: Vec<CheckSummary>,
    pub failures: usize,
    /// The first few counterexamples, in generation order.
    pub counterexamples: Vec<Counterexample>,
    pub verdict: Verdict,
}

const KEPT_COUNTEREXAMPLES: usize = 20;

#[derive(Default)]
struct Tally {
    counts: BTreeMap<&'static str, [usize; 3]>,
    examples: Vec<Counterexample>,
}

struct Case<'a> {
    family: &'static str,
    index: usize,
    graph: &'a TypedMultigraph,
    ports: Option<&'a PortAssignment>,
}

impl Tally {
    fn record<T: Serialize + PartialEq>(&mut self, case: &Case<'_>, check: &'static str, inputs: Value, expected: T, got: T) {
        let entry = self.counts.entry(check).or_default();
        let expected_json = json!(expected);
        entry[0] += 1;
        if expected_json == Value::Bool(true) {
            entry[1] += 1;
        }
        if expected != got {
            entry[2] += 1;
            self.examples.push(Counterexample {
                check: check.into(),
                family: case.family.into(),
                case: case.index,
                inputs,
                expected: expected_json,
                got: json!(got),
                graph: GraphFile::from_graph(case.graph, case.ports),
            });
        }
    }

    fn merge(&mut self, other: Tally) {
        for (k, c) in other.counts {
            let e = self.counts.entry(k).or_default();
            for i in 0..3 {
                e[i] += c[i];
            }
        }
        self.examples.extend(other.examples);
    }
}

fn case_rng(seed: u64, family: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((family << 32) | index as u64);
    rng
}

/// Random entity-attribute graph; `max_parallel = 1` gives a simple graph.
/// Node ids are shuffled so entities and attributes interleave.
fn random_teag(rng: &mut ChaCha8Rng, b: &FuzzBounds, max_parallel: usize) -> TypedMultigraph {
    let ne = rng.random_range(1..=b.max_entities);
    let na = rng.random_range(1..=b.max_attributes);
    let ket = rng.random_range(1..=b.max_entity_types);
    let kat = rng.random_range(1..=2);
    let kt = rng.random_range(1..=b.max_edge_types);
    let density = rng.random_range(0.05..0.6);

    let mut g = GraphBuilder::new();
    for i in 0..ket {
        g.node_type(&format!("E{i}"), TypeKind::Entity).expect("fresh");
    }
    for i in 0..kat {
        g.node_type(&format!("A{i}"), TypeKind::Attribute).expect("fresh");
    }
    for i in 0..kt {
        g.edge_type(&format!("t{i}")).expect("fresh");
    }
    let ents: Vec<_> =
        (0..ne).map(|_| g.add_node(NodeTypeId(rng.random_range(0..ket) as u32)).expect("registered")).collect();
    let attrs: Vec<_> = (0..na)
        .map(|_| g.add_node(NodeTypeId((ket + rng.random_range(0..kat)) as u32)).expect("registered"))
        .collect();
    let mut edges = Vec::new();
    for &u in &ents {
        for &a in &attrs {
            for t in 0..kt {
                if rng.random_bool(density) {
                    let m = rng.random_range(1..=max_parallel);
                    edges.extend(std::iter::repeat_n((u, a, t), m));
                }
            }
        }
    }
    edges.shuffle(rng);
    for (u, a, t) in edges {
        g.add_edge(u, a, EdgeTypeId(t as u32)).expect("known nodes");
    }
    g.set_bipartition(crate::graph::Bipartition { entities: ents, attributes: attrs });
    let built = g.build().expect("well formed");
    let mut perm: Vec<NodeId> = (0..built.node_count()).collect();
    perm.shuffle(rng);
    built.relabel(&perm).expect("valid permutation")
}

/// Valid ports from shuffled neighbor orders with gaps allowed: the `k`
/// distinct neighbors at each node get `k` distinct values from `1..=2k`.
fn random_ports(g: &TypedMultigraph, rng: &mut ChaCha8Rng) -> PortAssignment {
    let mut label = |nbrs: Vec<NodeId>| -> BTreeMap<NodeId, u32> {
        let k = nbrs.len();
        let values = index::sample(rng, 2 * k.max(1), k);
        nbrs.into_iter().zip(values.iter()).map(|(v, p)| (v, p as u32 + 1)).collect()
    };
    let in_labels: Vec<_> = g.nodes().map(|v| label(g.predecessors(v))).collect();
    let out_labels: Vec<_> = g.nodes().map(|v| label(g.successors(v))).collect();
    PortAssignment::new(
        g.edges()
            .iter()
            .map(|e| Ports { p_in: in_labels[e.dst][&e.src], p_out: out_labels[e.src][&e.dst] })
            .collect(),
    )
}

fn random_digraph(rng: &mut ChaCha8Rng, b: &FuzzBounds) -> TypedMultigraph {
    let n = rng.random_range(1..=b.max_nodes);
    let kt = rng.random_range(1..=2);
    let density = rng.random_range(0.05..0.5);
    let mut g = GraphBuilder::new();
    let s = g.node_type("s", TypeKind::Plain).expect("fresh");
    for i in 0..kt {
        g.edge_type(&format!("t{i}")).expect("fresh");
    }
    for _ in 0..n {
        g.add_node(s).expect("registered");
    }
    for u in 0..n {
        for v in 0..n {
            if rng.random_bool(density) {
                for _ in 0..rng.random_range(1..=2) {
                    g.add_edge(u, v, EdgeTypeId(rng.random_range(0..kt) as u32)).expect("known nodes");
                }
            }
        }
    }
    g.build().expect("well formed")
}

/// A random permutation viewed as a graph `v -> π(v)`.
fn random_functional(rng: &mut ChaCha8Rng, b: &FuzzBounds) -> TypedMultigraph {
    let n = rng.random_range(1..=b.max_nodes);
    let mut pi: Vec<NodeId> = (0..n).collect();
    pi.shuffle(rng);
    let mut g = GraphBuilder::new();
    let s = g.node_type("s", TypeKind::Plain).expect("fresh");
    let t = g.edge_type("t0").expect("fresh");
    for _ in 0..n {
        g.add_node(s).expect("registered");
    }
    for (v, &w) in pi.iter().enumerate() {
        g.add_edge(v, w, t).expect("known nodes");
    }
    g.build().expect("well formed")
}

fn cycle_length(g: &TypedMultigraph, v: NodeId) -> usize {
    let mut len = 1;
    let mut at = g.edge(g.out_edges(v)[0]).dst;
    while at != v {
        at = g.edge(g.out_edges(at)[0]).dst;
        len += 1;
    }
    len
}

fn check_simple(case: &Case<'_>, t: &mut Tally) -> Result<(), HarnessError> {
    let g = case.graph;
    let view = g.view();
    let ents: Vec<_> = view.entities().collect();
    let d1 = dup1_simple(&view)?;
    let canonical = assign_canonical_ports(g);
    let d1m = dup1_multigraph(&view, &canonical)?;
    for &u in &ents {
        t.record(case, "dup1_simple=oracle", json!({"u": u}), dup_r(&view, u, 1)?, d1[&u]);
        t.record(case, "dup1_multigraph=dup1_simple", json!({"u": u}), d1[&u], d1m[&u]);
        for r in 1..=4 {
            let trace = dupr_ego(&view, u, r)?;
            t.record(case, "dupr_ego=oracle", json!({"ego": u, "r": r}), dup_r(&view, u, r)?, trace.output);
            let multi = dupr_ego_multigraph(&view, &canonical, u, r)?;
            t.record(case, "dupr_ego_multigraph=dupr_ego", json!({"ego": u, "r": r}), &trace, &multi);
            if r == 1 {
                for &v in &ents {
                    t.record(case, "lemma1_ov=overlap", json!({"ego": u, "v": v}), overlap(&view, u, v)?, trace.ov[&v]);
                    let soft = soft_overlap(&view, u, v, &SimilarityTable::identity())?;
                    t.record(case, "soft_identity=overlap", json!({"u": u, "v": v}), overlap(&view, u, v)? as f64, soft);
                }
            }
        }
    }
    Ok(())
}

fn check_multigraph(case: &Case<'_>, t: &mut Tally) -> Result<(), HarnessError> {
    let g = case.graph;
    let view = g.view();
    let ports = case.ports.expect("multigraph cases carry ports");
    t.record(case, "random_ports_valid", json!({}), true, validate_ports(g, ports)?.is_valid());
    let refused = matches!(dup1_simple(&view), Err(ConstructionError::NotSimple));
    t.record(case, "dup1_simple_refuses_multigraph", json!({}), !view.is_simple(), refused);
    let d1 = dup1_multigraph(&view, ports)?;
    for u in view.entities() {
        t.record(case, "dup1_multigraph=oracle", json!({"u": u}), dup_r(&view, u, 1)?, d1[&u]);
        for r in 1..=4 {
            let trace = dupr_ego_multigraph(&view, ports, u, r)?;
            t.record(case, "dupr_ego_multigraph=oracle", json!({"ego": u, "r": r}), dup_r(&view, u, r)?, trace.output);
            if r == 1 {
                for v in view.entities() {
                    t.record(case, "multigraph_ov=overlap", json!({"ego": u, "v": v}), overlap(&view, u, v)?, trace.ov[&v]);
                }
            }
        }
    }
    Ok(())
}

fn check_digraph(case: &Case<'_>, max_ell: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let g = case.graph;
    for v in g.nodes() {
        for ell in 1..=max_ell {
            let walk = closed_walk(g, v, ell)?;
            t.record(case, "cyc_ego=closed_walk", json!({"v": v, "ell": ell}), walk, cyc_ego(g, v, ell)?.output);
            if cyc(g, v, ell)? {
                t.record(case, "cycle_implies_walk", json!({"v": v, "ell": ell}), true, walk);
            }
        }
    }
    Ok(())
}

fn check_functional(case: &Case<'_>, max_ell: usize, t: &mut Tally) -> Result<(), HarnessError> {
    let g = case.graph;
    for v in g.nodes() {
        let len = cycle_length(g, v);
        t.record(case, "functional_cyc_ego=cyc", json!({"v": v, "ell": len}), cyc(g, v, len)?, cyc_ego(g, v, len)?.output);
        for ell in 1..=max_ell {
            t.record(case, "functional_walk=divides", json!({"v": v, "ell": ell}), ell % len == 0, closed_walk(g, v, ell)?);
        }
    }
    Ok(())
}

/// Generate `n_graphs` graphs in each of four families and compare every
/// construction with its oracle:
///
/// - simple entity-attribute graphs,
/// - multigraphs, each under `port_assignments` random valid port numberings,
/// - general digraphs with self-loops and parallel edges,
/// - functional graphs.
pub fn run_fuzz(opts: &FuzzOptions) -> Result<FuzzReport, HarnessError> {
    opts.bounds.check()?;
    if opts.port_assignments == 0 {
        return Err(HarnessError::InvalidParameter("port_assignments must be at least 1".into()));
    }
    let b = &opts.bounds;
    let per_case = |family: u64, i: usize| -> Result<Tally, HarnessError> {
        let mut rng = case_rng(opts.seed, family, i);
        let mut t = Tally::default();
        match family {
            0 => {
                let g = random_teag(&mut rng, b, 1);
                check_simple(&Case { family: "simple", index: i, graph: &g, ports: None }, &mut t)?;
            }
            1 => {
                let g = random_teag(&mut rng, b, b.max_parallel);
                for _ in 0..opts.port_assignments {
                    let p = random_ports(&g, &mut rng);
                    check_multigraph(&Case { family: "multigraph", index: i, graph: &g, ports: Some(&p) }, &mut t)?;
                }
            }
            2 => {
                let g = random_digraph(&mut rng, b);
                check_digraph(&Case { family: "digraph", index: i, graph: &g, ports: None }, b.max_ell, &mut t)?;
            }
            _ => {
                let g = random_functional(&mut rng, b);
                check_functional(&Case { family: "functional", index: i, graph: &g, ports: None }, b.max_ell, &mut t)?;
            }
        }
        Ok(t)
    };

    let jobs: Vec<(u64, usize)> = (0..4u64).flat_map(|f| (0..opts.n_graphs).map(move |i| (f, i))).collect();
    let tallies = jobs.par_iter().map(|&(f, i)| per_case(f, i)).collect::<Result<Vec<_>, _>>()?;
    let mut total = Tally::default();
    for t in tallies {
        total.merge(t);
    }
    let checks: Vec<CheckSummary> = total
        .counts
        .iter()
        .map(|(k, &[n, p, f])| CheckSummary { check: (*k).into(), comparisons: n, positives: p, failures: f })
        .collect();
    let failures = checks.iter().map(|c| c.failures).sum();
    total.examples.truncate(KEPT_COUNTEREXAMPLES);
    Ok(FuzzReport {
        kind: "fuzz".into(),
        options: opts.clone(),
        checks,
        failures,
        counterexamples: total.examples,
        verdict: Verdict::from_bool(failures == 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_graphs_is_an_empty_pass() {
        let r = run_fuzz(&FuzzOptions { n_graphs: 0, ..Default::default() }).unwrap();
        assert!(r.checks.is_empty());
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn bound_violation_is_refused() {
        let bounds = FuzzBounds { max_entities: 9, ..Default::default() };
        let err = run_fuzz(&FuzzOptions { bounds, ..Default::default() }).unwrap_err();
        assert!(err.to_string().contains("max_entities"));
    }

    #[test]
    fn small_run_is_clean() {
        let r = run_fuzz(&FuzzOptions { n_graphs: 20, seed: 11, ..Default::default() }).unwrap();
        assert_eq!(r.failures, 0, "{:#?}", r.counterexamples.first());
        assert!(r.checks.iter().all(|c| c.comparisons > 0));
    }

    #[test]
    fn random_ports_are_valid() {
        let mut rng = case_rng(3, 1, 0);
        for _ in 0..30 {
            let g = random_teag(&mut rng, &FuzzBounds::default(), 2);
            let p = random_ports(&g, &mut rng);
            assert!(validate_ports(&g, &p).unwrap().is_valid());
        }
    }
}
