//! Generators for the graph pairs that separate message-passing architectures.
//!
//! Each pair has a target node in `g1` where the predicate holds and a target
//! node in `g2` where it fails, while the two graphs share their
//! `(type, in-degree, out-degree)` profile. Node ids follow the listing order
//! `u, v, w, x, a_1.., b_1..` (or `v_i, w_i` and `z_i` for cycles), and nodes
//! carry those names.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::{write_graph, write_json, FormatError};
use crate::graph::{
    assign_canonical_ports, Bipartition, GraphBuilder, GraphError, NodeId, NodeTypeId, PortAssignment,
    Ports, TypeKind, TypedMultigraph,
};
use crate::oracles::{self, OracleError};

#[derive(Debug, Error)]
pub enum SeparationError {
    #[error("r must be at least 2, got {0}")]
    SmallR(usize),
    #[error("cycle length must be at least 3, got {0}")]
    ShortCycle(usize),
    #[error("invalid partition of 1..={r}: {reason}")]
    InvalidPartition { r: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "predicate", rename_all = "lowercase")]
pub enum Predicate {
    Dup { r: usize },
    Cyc { ell: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationPair {
    pub name: String,
    pub g1: TypedMultigraph,
    pub g2: TypedMultigraph,
    pub ports1: Option<PortAssignment>,
    pub ports2: Option<PortAssignment>,
    pub target1: NodeId,
    pub target2: NodeId,
    pub predicate: Predicate,
    pub labels: (bool, bool),
}

impl SeparationPair {
    /// Evaluate the brute-force oracle on both targets.
    pub fn oracle_labels(&self) -> Result<(bool, bool), SeparationError> {
        let eval = |g: &TypedMultigraph, t: NodeId| -> Result<bool, OracleError> {
            match self.predicate {
                Predicate::Dup { r } => oracles::dup_r(&g.view(), t, r),
                Predicate::Cyc { ell } => oracles::cyc(g, t, ell),
            }
        };
        Ok((eval(&self.g1, self.target1)?, eval(&self.g2, self.target2)?))
    }

    /// Write `g1.json`, `g2.json` and `manifest.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), SeparationError> {
        write_graph(&dir.join("g1.json"), &self.g1, self.ports1.as_ref())?;
        write_graph(&dir.join("g2.json"), &self.g2, self.ports2.as_ref())?;
        write_json(&dir.join("manifest.json"), &self.manifest())?;
        Ok(())
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            name: self.name.clone(),
            predicate: self.predicate,
            targets: [self.target1, self.target2],
            target_names: [self.g1.node_name(self.target1), self.g2.node_name(self.target2)],
            expected_labels: [self.labels.0 as u8, self.labels.1 as u8],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    #[serde(flatten)]
    pub predicate: Predicate,
    pub targets: [NodeId; 2],
    pub target_names: [String; 2],
    pub expected_labels: [u8; 2],
}

/// Builder for small entity-attribute graphs addressed by node name.
struct Teag {
    b: GraphBuilder,
    entities: Vec<NodeId>,
    attributes: Vec<NodeId>,
}

impl Teag {
    fn new<A: AsRef<str>, E: AsRef<str>>(entity_types: &[&str], attribute_types: &[A], edge_types: &[E]) -> Self {
        let mut b = GraphBuilder::new();
        for t in entity_types {
            b.node_type(t, TypeKind::Entity).expect("distinct names");
        }
        for t in attribute_types {
            b.node_type(t.as_ref(), TypeKind::Attribute).expect("distinct names");
        }
        for t in edge_types {
            b.edge_type(t.as_ref()).expect("distinct names");
        }
        Self { b, entities: Vec::new(), attributes: Vec::new() }
    }

    fn entity(&mut self, ty: u32, name: &str) -> NodeId {
        let v = self.b.add_named_node(NodeTypeId(ty), name).expect("registered type");
        self.entities.push(v);
        v
    }

    fn attribute(&mut self, ty: u32, name: &str) -> NodeId {
        let v = self.b.add_named_node(NodeTypeId(ty), name).expect("registered type");
        self.attributes.push(v);
        v
    }

    fn edge(&mut self, src: NodeId, dst: NodeId, ty: u32) {
        self.b.add_edge(src, dst, crate::graph::EdgeTypeId(ty)).expect("known nodes");
    }

    fn build(mut self) -> TypedMultigraph {
        self.b.set_bipartition(Bipartition { entities: self.entities, attributes: self.attributes });
        self.b.build().expect("generator output is well formed")
    }
}

/// `G1`: `u, v → a`; `G2`: `u → a`.
pub fn gen_thm1_pair() -> SeparationPair {
    let build = |with_v: bool| {
        let mut t = Teag::new(&["sigma"], &["alpha"], &["tau1"]);
        let u = t.entity(0, "u");
        let v = with_v.then(|| t.entity(0, "v"));
        let a = t.attribute(1, "a");
        t.edge(u, a, 0);
        if let Some(v) = v {
            t.edge(v, a, 0);
        }
        t.build()
    };
    SeparationPair {
        name: "thm1".into(),
        g1: build(true),
        g2: build(false),
        ports1: None,
        ports2: None,
        target1: 0,
        target2: 0,
        predicate: Predicate::Dup { r: 1 },
        labels: (true, false),
    }
}

/// `G1`: `u, v` each point to `a1, a2`; `G2`: `u ⇉ a1`, `v ⇉ a2`. All edges
/// `τ1`. Canonical ports.
pub fn gen_thm2_pair() -> SeparationPair {
    let build = |edges: [(usize, usize); 4]| {
        let mut t = Teag::new(&["sigma"], &["alpha1"], &["tau1"]);
        let ents = [t.entity(0, "u"), t.entity(0, "v")];
        let attrs = [t.attribute(1, "a1"), t.attribute(1, "a2")];
        for (s, d) in edges {
            t.edge(ents[s], attrs[d], 0);
        }
        t.build()
    };
    let g1 = build([(0, 0), (0, 1), (1, 0), (1, 1)]);
    let g2 = build([(0, 0), (0, 0), (1, 1), (1, 1)]);
    SeparationPair {
        name: "thm2".into(),
        ports1: Some(assign_canonical_ports(&g1)),
        ports2: Some(assign_canonical_ports(&g2)),
        g1,
        g2,
        target1: 0,
        target2: 0,
        predicate: Predicate::Dup { r: 1 },
        labels: (true, false),
    }
}

/// Ports by entity class: class-1 entities use `p_in = 1`, class-2 entities
/// `p_in = 2`; the `τ_j` edge leaves on `p_out = j`.
fn class_ports(g: &TypedMultigraph, class2: &[NodeId]) -> PortAssignment {
    PortAssignment::new(
        g.edges()
            .iter()
            .map(|e| Ports {
                p_in: if class2.contains(&e.src) { 2 } else { 1 },
                p_out: e.ty.0 + 1,
            })
            .collect(),
    )
}

/// The `K_{2,2}` pair with its fixed port tables. `G1` is two disjoint
/// `K_{2,2}` blocks; in `G2` the neighbors of `u` are split between `v1`
/// and `v2`.
pub fn gen_k22_example() -> SeparationPair {
    let build = |names: [&str; 4], edges: [(usize, usize); 8]| {
        let mut t = Teag::new(&["sigma"], &["alpha1", "alpha2"], &["tau1", "tau2"]);
        let ents: Vec<_> = names.iter().map(|n| t.entity(0, n)).collect();
        let attr_type = [1, 2, 1, 2];
        let attrs: Vec<_> =
            (0..4).map(|i| t.attribute(attr_type[i], &format!("a{}", i + 1))).collect();
        for (s, d) in edges {
            // a1, a3 are alpha1 (τ1); a2, a4 are alpha2 (τ2).
            t.edge(ents[s], attrs[d], (attr_type[d] - 1) as u32);
        }
        t.build()
    };
    let g1 = build(
        ["u", "v", "w", "x"],
        [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)],
    );
    let g2 = build(
        ["u", "v1", "v2", "v3"],
        [(0, 0), (0, 1), (1, 0), (1, 3), (2, 2), (2, 1), (3, 2), (3, 3)],
    );
    SeparationPair {
        name: "k22".into(),
        ports1: Some(class_ports(&g1, &[1, 3])),
        ports2: Some(class_ports(&g2, &[1, 2])),
        g1,
        g2,
        target1: 0,
        target2: 0,
        predicate: Predicate::Dup { r: 2 },
        labels: (true, false),
    }
}

/// Two disjoint `K_{2,r}` blocks versus the split configuration.
///
/// `partition` is `(S1, S2)` over `1..=r`; the default is `S1 = {1}`,
/// `S2 = {2..r}`. In `G2`, `v1` takes `a_j` for `j ∈ S1` and `b_j` for
/// `j ∈ S2`, and `v2` takes the complement.
pub fn gen_k2r_pair(r: usize, partition: Option<(Vec<usize>, Vec<usize>)>) -> Result<SeparationPair, SeparationError> {
    if r < 2 {
        return Err(SeparationError::SmallR(r));
    }
    let (s1, s2) = partition.unwrap_or_else(|| (vec![1], (2..=r).collect()));
    check_partition(r, &s1, &s2)?;

    let build = |names: [&str; 4], targets: &dyn Fn(usize) -> (Vec<usize>, Vec<usize>)| {
        let alphas: Vec<_> = (1..=r).map(|j| format!("alpha{j}")).collect();
        let taus: Vec<_> = (1..=r).map(|j| format!("tau{j}")).collect();
        let mut t = Teag::new(&["sigma"], &alphas, &taus);
        let ents: Vec<_> = names.iter().map(|n| t.entity(0, n)).collect();
        let a: Vec<_> = (1..=r).map(|j| t.attribute(j as u32, &format!("a{j}"))).collect();
        let b: Vec<_> = (1..=r).map(|j| t.attribute(j as u32, &format!("b{j}"))).collect();
        for (i, &e) in ents.iter().enumerate() {
            let (on_a, on_b) = targets(i);
            let mut js: Vec<(usize, NodeId)> = on_a.iter().map(|&j| (j, a[j - 1])).collect();
            js.extend(on_b.iter().map(|&j| (j, b[j - 1])));
            js.sort_unstable();
            for (j, dst) in js {
                t.edge(e, dst, (j - 1) as u32);
            }
        }
        t.build()
    };
    let all: Vec<usize> = (1..=r).collect();
    let g1 = build(["u", "v", "w", "x"], &|i| match i {
        0 | 1 => (all.clone(), vec![]),
        _ => (vec![], all.clone()),
    });
    let g2 = build(["u", "v1", "v2", "v3"], &|i| match i {
        0 => (all.clone(), vec![]),
        1 => (s1.clone(), s2.clone()),
        2 => (s2.clone(), s1.clone()),
        _ => (vec![], all.clone()),
    });
    Ok(SeparationPair {
        name: format!("k2r_r{r}"),
        ports1: Some(class_ports(&g1, &[1, 3])),
        ports2: Some(class_ports(&g2, &[1, 2])),
        g1,
        g2,
        target1: 0,
        target2: 0,
        predicate: Predicate::Dup { r },
        labels: (true, false),
    })
}

fn check_partition(r: usize, s1: &[usize], s2: &[usize]) -> Result<(), SeparationError> {
    let fail = |reason: &str| Err(SeparationError::InvalidPartition { r, reason: reason.into() });
    if s1.is_empty() || s2.is_empty() {
        return fail("both parts must be nonempty");
    }
    let mut seen = vec![false; r + 1];
    for &j in s1.iter().chain(s2) {
        if j == 0 || j > r {
            return fail(&format!("index {j} out of range"));
        }
        if seen[j] {
            return fail(&format!("index {j} appears twice"));
        }
        seen[j] = true;
    }
    if seen[1..].iter().any(|&s| !s) {
        return fail("parts do not cover every index");
    }
    Ok(())
}

/// `G1 = 2C_ℓ` (`v_i`, `w_i`) versus `G2 = C_{2ℓ}` (`z_i`), one node type, one
/// edge type, canonical ports (all 1).
pub fn gen_cycle_pair(ell: usize) -> Result<SeparationPair, SeparationError> {
    if ell < 3 {
        return Err(SeparationError::ShortCycle(ell));
    }
    let build = |rings: &[(&str, usize)]| {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Plain).expect("fresh");
        let t = b.edge_type("tau1").expect("fresh");
        let mut base = 0;
        for &(prefix, len) in rings {
            for i in 1..=len {
                b.add_named_node(s, &format!("{prefix}{i}")).expect("fresh");
            }
            for i in 0..len {
                b.add_edge(base + i, base + (i + 1) % len, t).expect("known nodes");
            }
            base += len;
        }
        b.build().expect("well formed")
    };
    let g1 = build(&[("v", ell), ("w", ell)]);
    let g2 = build(&[("z", 2 * ell)]);
    Ok(SeparationPair {
        name: format!("cycle_l{ell}"),
        ports1: Some(assign_canonical_ports(&g1)),
        ports2: Some(assign_canonical_ports(&g2)),
        g1,
        g2,
        target1: 0,
        target2: 0,
        predicate: Predicate::Cyc { ell },
        labels: (true, false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{validate_entity_attribute, validate_ports};

    #[test]
    fn thm1_shape() {
        let p = gen_thm1_pair();
        assert_eq!((p.g1.edge_count(), p.g2.edge_count()), (2, 1));
        assert_eq!(p.oracle_labels().unwrap(), (true, false));
        assert!(validate_entity_attribute(&p.g1, &p.g1.view()).is_valid());
    }

    #[test]
    fn thm2_shape() {
        let p = gen_thm2_pair();
        assert!(p.g1.view().is_simple());
        assert!(!p.g2.view().is_simple());
        assert_eq!(p.g1.degree_type_profile(), p.g2.degree_type_profile());
        assert_eq!(p.oracle_labels().unwrap(), (true, false));
    }

    #[test]
    fn k22_ports_and_overlaps() {
        let p = gen_k22_example();
        assert!(validate_ports(&p.g1, p.ports1.as_ref().unwrap()).unwrap().is_valid());
        assert!(validate_ports(&p.g2, p.ports2.as_ref().unwrap()).unwrap().is_valid());
        let view = p.g2.view();
        let ov: Vec<_> = (1..4).map(|v| oracles::overlap(&view, 0, v).unwrap()).collect();
        assert_eq!(ov, vec![1, 1, 0]);
        let n = view.typed_neighborhood(p.g2.node_by_name("v3").unwrap()).unwrap();
        let names: Vec<_> = n.iter().map(|&(a, t)| (p.g2.node_name(a), p.g2.edge_type_name(t).to_owned())).collect();
        assert_eq!(names, vec![("a3".into(), "tau1".into()), ("a4".into(), "tau2".into())]);
    }

    #[test]
    fn k2r_counts() {
        for r in 2..=5 {
            let p = gen_k2r_pair(r, None).unwrap();
            for g in [&p.g1, &p.g2] {
                assert_eq!(g.view().entities().count(), 4);
                assert_eq!(g.view().attributes().count(), 2 * r);
                assert_eq!(g.edge_count(), 4 * r);
            }
            assert_eq!(p.oracle_labels().unwrap(), (true, false));
        }
    }

    #[test]
    fn k2r_partition_errors() {
        assert!(matches!(gen_k2r_pair(1, None), Err(SeparationError::SmallR(1))));
        for (s1, s2) in [(vec![], vec![1, 2, 3]), (vec![1, 1], vec![2, 3]), (vec![1], vec![2]), (vec![0], vec![1, 2, 3])] {
            assert!(matches!(gen_k2r_pair(3, Some((s1, s2))), Err(SeparationError::InvalidPartition { .. })));
        }
        assert!(gen_k2r_pair(3, Some((vec![2], vec![3, 1]))).is_ok());
    }

    #[test]
    fn cycle_pair_shape() {
        let p = gen_cycle_pair(3).unwrap();
        assert!(p.g1.is_functional() && p.g2.is_functional());
        assert_eq!(p.ports1.as_ref().unwrap().max_p_in(), 1);
        assert_eq!(p.g2.node_name(5), "z6");
        assert!(matches!(gen_cycle_pair(2), Err(SeparationError::ShortCycle(2))));
    }

    #[test]
    fn manifest_json() {
        let m = gen_k2r_pair(3, None).unwrap().manifest();
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["predicate"], "dup");
        assert_eq!(v["r"], 3);
        assert_eq!(v["expected_labels"], serde_json::json!([1, 0]));
    }
}
