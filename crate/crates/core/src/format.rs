//! JSON interchange files: graphs, similarity tables and pair manifests.
//!
//! A graph file is one JSON object:
//!
//! ```json
//! {
//!   "node_types": [{"name": "sigma", "kind": "entity"}, {"name": "alpha1", "kind": "attribute"}],
//!   "edge_types": ["tau1"],
//!   "nodes": [{"id": 0, "type": 0, "name": "u"}, {"id": 1, "type": 1, "name": "a"}],
//!   "edges": [{"id": 0, "src": 0, "dst": 1, "type": 0}],
//!   "ports": [{"edge": 0, "p_in": 1, "p_out": 1}],
//!   "bipartition": {"entities": [0], "attributes": [1]}
//! }
//! ```
//!
//! `type` fields are 0-based indices into the corresponding catalog. `name`,
//! `ports` and `bipartition` are optional. Node and edge ids must be exactly
//! `0..n`, in any order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    Bipartition, EdgeTypeId, GraphBuilder, GraphError, NodeTypeDef, NodeTypeId, PortAssignment,
    Ports, TypedMultigraph,
};
use crate::oracles::{OracleError, SimilarityTable};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{kind} ids must be exactly 0..{count}; id {id} is missing or repeated")]
    NonDenseIds { kind: &'static str, count: usize, id: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Similarity(#[from] OracleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    #[serde(rename = "type")]
    pub ty: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
    #[serde(rename = "type")]
    pub ty: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortRecord {
    pub edge: usize,
    pub p_in: u32,
    pub p_out: u32,
}

/// On-disk shape of a graph file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub node_types: Vec<NodeTypeDef>,
    pub edge_types: Vec<String>,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ports: Option<Vec<PortRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bipartition: Option<Bipartition>,
}

fn dense_order<T>(
    items: &[T],
    id: impl Fn(&T) -> usize,
    kind: &'static str,
) -> Result<Vec<usize>, FormatError> {
    let count = items.len();
    let mut order = vec![usize::MAX; count];
    for (pos, item) in items.iter().enumerate() {
        let i = id(item);
        if i >= count || order[i] != usize::MAX {
            return Err(FormatError::NonDenseIds { kind, count, id: i });
        }
        order[i] = pos;
    }
    Ok(order)
}

impl GraphFile {
    pub fn from_graph(graph: &TypedMultigraph, ports: Option<&PortAssignment>) -> Self {
        GraphFile {
            node_types: graph.node_types().to_vec(),
            edge_types: graph.edge_types().to_vec(),
            nodes: graph
                .nodes()
                .map(|v| NodeRecord {
                    id: v,
                    ty: graph.node_type(v).0,
                    name: graph.has_name(v).then(|| graph.node_name(v)),
                })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeRecord { id, src: e.src, dst: e.dst, ty: e.ty.0 })
                .collect(),
            ports: ports.map(|p| {
                p.iter()
                    .map(|(edge, Ports { p_in, p_out })| PortRecord { edge, p_in, p_out })
                    .collect()
            }),
            bipartition: graph.bipartition().cloned(),
        }
    }

    pub fn into_graph(self) -> Result<(TypedMultigraph, Option<PortAssignment>), FormatError> {
        let mut b = GraphBuilder::with_catalog(self.node_types, self.edge_types)?;
        for pos in dense_order(&self.nodes, |n| n.id, "node")? {
            let node = &self.nodes[pos];
            match &node.name {
                Some(name) => b.add_named_node(NodeTypeId(node.ty), name)?,
                None => b.add_node(NodeTypeId(node.ty))?,
            };
        }
        for pos in dense_order(&self.edges, |e| e.id, "edge")? {
            let e = &self.edges[pos];
            b.add_edge(e.src, e.dst, EdgeTypeId(e.ty))?;
        }
        if let Some(bp) = self.bipartition {
            b.set_bipartition(bp);
        }
        let graph = b.build()?;
        let ports = match self.ports {
            Some(records) => Some(PortAssignment::from_entries(
                graph.edge_count(),
                records.into_iter().map(|r| (r.edge, Ports { p_in: r.p_in, p_out: r.p_out })),
            )?),
            None => None,
        };
        Ok((graph, ports))
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

/// Write `value` as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|source| FormatError::Io { path: parent.display().to_string(), source })?;
    }
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn read_graph(path: &Path) -> Result<(TypedMultigraph, Option<PortAssignment>), FormatError> {
    let file: GraphFile = serde_json::from_str(&read(path)?)?;
    file.into_graph()
}

pub fn write_graph(
    path: &Path,
    graph: &TypedMultigraph,
    ports: Option<&PortAssignment>,
) -> Result<(), FormatError> {
    write_json(path, &GraphFile::from_graph(graph, ports))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRecord {
    pub a: usize,
    pub b: usize,
    pub sim: f64,
}

pub fn parse_similarity_table(text: &str) -> Result<SimilarityTable, FormatError> {
    let records: Vec<SimilarityRecord> = serde_json::from_str(text)?;
    let mut table = SimilarityTable::identity();
    for r in records {
        table.set(r.a, r.b, r.sim)?;
    }
    Ok(table)
}

pub fn read_similarity_table(path: &Path) -> Result<SimilarityTable, FormatError> {
    parse_similarity_table(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{assign_canonical_ports, TypeKind};

    fn sample() -> TypedMultigraph {
        let mut b = GraphBuilder::new();
        let s = b.node_type("sigma", TypeKind::Entity).unwrap();
        let a = b.node_type("alpha1", TypeKind::Attribute).unwrap();
        let t = b.edge_type("tau1").unwrap();
        let u = b.add_named_node(s, "u").unwrap();
        let x = b.add_named_node(a, "a").unwrap();
        b.add_edge(u, x, t).unwrap();
        b.add_edge(u, x, t).unwrap();
        b.set_bipartition(Bipartition { entities: vec![0], attributes: vec![1] });
        b.build().unwrap()
    }

    #[test]
    fn graph_file_round_trip() {
        let g = sample();
        let p = assign_canonical_ports(&g);
        let text = serde_json::to_string(&GraphFile::from_graph(&g, Some(&p))).unwrap();
        let (h, q) = serde_json::from_str::<GraphFile>(&text).unwrap().into_graph().unwrap();
        assert_eq!(g, h);
        assert_eq!(Some(p), q);
    }

    #[test]
    fn shuffled_ids_are_accepted() {
        let text = r#"{
            "node_types": [{"name": "s", "kind": "plain"}],
            "edge_types": ["t"],
            "nodes": [{"id": 1, "type": 0}, {"id": 0, "type": 0}],
            "edges": [{"id": 0, "src": 1, "dst": 0, "type": 0}]
        }"#;
        let (g, ports) = serde_json::from_str::<GraphFile>(text).unwrap().into_graph().unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge(0).src, 1);
        assert!(ports.is_none());
        assert!(g.bipartition().is_none());
    }

    #[test]
    fn gaps_in_ids_are_rejected() {
        let text = r#"{
            "node_types": [{"name": "s", "kind": "plain"}],
            "edge_types": [],
            "nodes": [{"id": 0, "type": 0}, {"id": 2, "type": 0}],
            "edges": []
        }"#;
        let err = serde_json::from_str::<GraphFile>(text).unwrap().into_graph().unwrap_err();
        assert!(matches!(err, FormatError::NonDenseIds { kind: "node", .. }));
    }

    #[test]
    fn missing_port_entry_is_rejected() {
        let mut file = GraphFile::from_graph(&sample(), Some(&assign_canonical_ports(&sample())));
        file.ports.as_mut().unwrap().pop();
        assert!(matches!(file.into_graph(), Err(FormatError::Graph(GraphError::MissingPorts(1)))));
    }

    #[test]
    fn similarity_table_parsing() {
        let t = parse_similarity_table(r#"[{"a": 3, "b": 4, "sim": 0.92}]"#).unwrap();
        assert_eq!(t.get(4, 3), 0.92);
        assert_eq!(t.get(3, 3), 1.0);
        assert_eq!(t.get(3, 5), 0.0);
        assert!(parse_similarity_table(r#"[{"a": 1, "b": 2, "sim": 1.5}]"#).is_err());
    }
}
