//! Immutable labeled graphs.
//!
//! A [`Graph`] is a finite set of nodes and edges with total source and target
//! maps. Nodes and edges carry opaque string ids and an optional text label.
//! Graphs are validated on construction and never change afterwards; derived
//! data (adjacency, certificate, content digest) is computed once.

mod certificate;
mod iso;
mod morphism;
mod order;

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use certificate::{certificate, node_colors, refinement_rounds, Certificate};
pub use iso::{find_isomorphism, isomorphic};
pub use morphism::{
    enumerate_morphisms, exists_morphism, for_each_morphism, LabelMode, MatchOptions, Morphism,
};
pub use order::{compare, EdgesAsc, GraphOrder, GraphRef, NodesAsc, OrderRegistry, Reversed, UnknownOrder};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub String);

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_owned())
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Identifier of a graph interned in a [`crate::store::GraphStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphId(pub u64);

impl fmt::Display for GraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: NodeId,
    pub tgt: NodeId,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge `{edge}` refers to missing node `{node}`")]
    DanglingEdgeRef { edge: EdgeId, node: NodeId },
    #[error("duplicate node id `{0}`")]
    DuplicateNodeId(NodeId),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdgeId(EdgeId),
}

/// An immutable, validated graph.
///
/// Nodes and edges are kept sorted by id, so two graphs with the same
/// elements are equal and serialize to the same bytes.
#[derive(Clone)]
pub struct Graph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_index: HashMap<NodeId, usize>,
    edge_index: HashMap<EdgeId, usize>,
    // per edge: (source index, target index)
    ends: Vec<(usize, usize)>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    cert: OnceLock<Certificate>,
    digest: OnceLock<[u8; 32]>,
}

impl Graph {
    /// Validates and builds a graph. Errors are reported, never repaired.
    pub fn new(mut nodes: Vec<Node>, mut edges: Vec<Edge>) -> Result<Graph, GraphError> {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = nodes.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateNodeId(w[0].id.clone()));
        }
        if let Some(w) = edges.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateEdgeId(w[0].id.clone()));
        }
        let node_index: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
        let mut ends = Vec::with_capacity(edges.len());
        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut in_edges = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            let lookup = |n: &NodeId| {
                node_index.get(n).copied().ok_or_else(|| GraphError::DanglingEdgeRef {
                    edge: e.id.clone(),
                    node: n.clone(),
                })
            };
            let s = lookup(&e.src)?;
            let t = lookup(&e.tgt)?;
            ends.push((s, t));
            out_edges[s].push(i);
            in_edges[t].push(i);
        }
        let edge_index = edges.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        Ok(Graph {
            nodes,
            edges,
            node_index,
            edge_index,
            ends,
            out_edges,
            in_edges,
            cert: OnceLock::new(),
            digest: OnceLock::new(),
        })
    }

    pub fn empty() -> Graph {
        Graph::new(Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.node_index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edge_index.get(id).map(|&i| &self.edges[i])
    }

    pub fn contains_node(&self, id: &NodeId) -> bool {
        self.node_index.contains_key(id)
    }

    pub fn contains_edge(&self, id: &EdgeId) -> bool {
        self.edge_index.contains_key(id)
    }

    pub(crate) fn node_idx(&self, id: &NodeId) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub(crate) fn edge_idx(&self, id: &EdgeId) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub(crate) fn ends(&self, edge: usize) -> (usize, usize) {
        self.ends[edge]
    }

    pub(crate) fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    pub(crate) fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    /// Ids of edges with the given node as source or target (loops once).
    pub fn incident_edges(&self, id: &NodeId) -> Vec<&EdgeId> {
        let Some(i) = self.node_idx(id) else {
            return Vec::new();
        };
        let mut idx: Vec<usize> = self.out_edges[i].iter().chain(&self.in_edges[i]).copied().collect();
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter().map(|e| &self.edges[e].id).collect()
    }

    /// Isomorphism-invariant hash, computed on first use and cached.
    pub fn certificate(&self) -> &Certificate {
        self.cert.get_or_init(|| certificate::compute(self))
    }

    /// Canonical JSON encoding; identical graphs give identical bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("graph serialization cannot fail")
    }

    /// SHA-256 of the canonical encoding, cached.
    pub fn digest(&self) -> &[u8; 32] {
        self.digest.get_or_init(|| Sha256::digest(self.canonical_bytes()).into())
    }

    /// Checks that every edge endpoint exists. Always true for a graph built
    /// through [`Graph::new`]; used by store audits on deserialized data.
    pub fn has_no_dangling_edges(&self) -> bool {
        self.edges
            .iter()
            .all(|e| self.node_index.contains_key(&e.src) && self.node_index.contains_key(&e.tgt))
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("nodes", &self.nodes).field("edges", &self.edges).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Borrowed<'a> {
            nodes: &'a [Node],
            edges: &'a [Edge],
        }
        Borrowed { nodes: &self.nodes, edges: &self.edges }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        Graph::new(raw.nodes, raw.edges).map_err(serde::de::Error::custom)
    }
}

/// Incremental construction helper.
#[derive(Default, Clone, Debug)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn node(mut self, id: &str, label: Option<&str>) -> Self {
        self.nodes.push(Node { id: id.into(), label: label.map(str::to_owned) });
        self
    }

    pub fn edge(mut self, id: &str, src: &str, tgt: &str, label: Option<&str>) -> Self {
        self.edges.push(Edge {
            id: id.into(),
            src: src.into(),
            tgt: tgt.into(),
            label: label.map(str::to_owned),
        });
        self
    }

    pub fn build(self) -> Result<Graph, GraphError> {
        Graph::new(self.nodes, self.edges)
    }
}
