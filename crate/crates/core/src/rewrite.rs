//! Rules, the gluing condition and rule application.
//!
//! A rule is a pair of graphs whose interface is the set of node and edge
//! ids present in both sides. Applying a rule at a match deletes the images
//! of left-only elements, keeps the images of interface elements and adds
//! fresh copies of right-only elements. Fresh ids are hashes of the host
//! content, the rule name, the match and the right-hand element id, so the
//! same application always yields the same graph.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constraint::{satisfies, Constraint};
use crate::graph::{
    enumerate_morphisms, Edge, EdgeId, Graph, GraphError, GraphId, LabelMode, Morphism, Node, NodeId,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule `{rule}`: shared node `{id}` has different labels on the two sides")]
    NodeLabelConflict { rule: String, id: NodeId },
    #[error("rule `{rule}`: shared edge `{id}` differs in label or endpoints on the two sides")]
    EdgeConflict { rule: String, id: EdgeId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("rule `{rule}`: invalid match ({reason})")]
    InvalidMatch { rule: String, reason: &'static str },
    #[error("rule `{rule}`: result is not a valid graph: {source}")]
    Graph { rule: String, source: GraphError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    name: String,
    lhs: Graph,
    rhs: Graph,
    iso_match: bool,
}

impl Rule {
    /// Builds a rule; shared ids must agree in label and, for edges, in
    /// endpoints.
    pub fn new(name: impl Into<String>, lhs: Graph, rhs: Graph, iso_match: bool) -> Result<Rule, RuleError> {
        let name = name.into();
        for n in lhs.nodes() {
            if let Some(r) = rhs.node(&n.id) {
                if r.label != n.label {
                    return Err(RuleError::NodeLabelConflict { rule: name, id: n.id.clone() });
                }
            }
        }
        for e in lhs.edges() {
            if let Some(r) = rhs.edge(&e.id) {
                if r != e {
                    return Err(RuleError::EdgeConflict { rule: name, id: e.id.clone() });
                }
            }
        }
        Ok(Rule { name, lhs, rhs, iso_match })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs(&self) -> &Graph {
        &self.lhs
    }

    pub fn rhs(&self) -> &Graph {
        &self.rhs
    }

    pub fn iso_match(&self) -> bool {
        self.iso_match
    }

    pub fn is_interface_node(&self, id: &NodeId) -> bool {
        self.lhs.contains_node(id) && self.rhs.contains_node(id)
    }

    pub fn is_interface_edge(&self, id: &EdgeId) -> bool {
        self.lhs.contains_edge(id) && self.rhs.contains_edge(id)
    }

    pub fn deleted_nodes(&self) -> impl Iterator<Item = &Node> {
        self.lhs.nodes().iter().filter(|n| !self.rhs.contains_node(&n.id))
    }

    pub fn deleted_edges(&self) -> impl Iterator<Item = &Edge> {
        self.lhs.edges().iter().filter(|e| !self.rhs.contains_edge(&e.id))
    }

    pub fn created_nodes(&self) -> impl Iterator<Item = &Node> {
        self.rhs.nodes().iter().filter(|n| !self.lhs.contains_node(&n.id))
    }

    pub fn created_edges(&self) -> impl Iterator<Item = &Edge> {
        self.rhs.edges().iter().filter(|e| !self.lhs.contains_edge(&e.id))
    }

    /// The rule with both sides swapped.
    pub fn inverse(&self) -> Rule {
        Rule {
            name: format!("{}~inv", self.name),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            iso_match: self.iso_match,
        }
    }
}

/// One logged rule application `input =(rule, match)=> output`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivationStep {
    pub rule_name: String,
    #[serde(rename = "match")]
    pub matching: Morphism,
    pub input: GraphId,
    pub output: GraphId,
}

/// Dangling and identification conditions for `m: lhs -> host`.
pub fn satisfies_gluing(rule: &Rule, host: &Graph, m: &Morphism) -> bool {
    // identification: a deleted element's image has exactly one preimage
    let mut node_preimages: BTreeMap<&NodeId, usize> = BTreeMap::new();
    for h in m.node_map.values() {
        *node_preimages.entry(h).or_default() += 1;
    }
    let mut edge_preimages: BTreeMap<&EdgeId, usize> = BTreeMap::new();
    for h in m.edge_map.values() {
        *edge_preimages.entry(h).or_default() += 1;
    }
    let deleted_node_images: Vec<&NodeId> = rule.deleted_nodes().filter_map(|n| m.node(&n.id)).collect();
    let deleted_edge_images: BTreeSet<&EdgeId> = rule.deleted_edges().filter_map(|e| m.edge(&e.id)).collect();
    if deleted_node_images.iter().any(|h| node_preimages[h] != 1)
        || deleted_edge_images.iter().any(|h| edge_preimages[h] != 1)
    {
        return false;
    }
    // dangling: every host edge at a deleted node is itself deleted
    deleted_node_images
        .iter()
        .all(|h| host.incident_edges(h).into_iter().all(|e| deleted_edge_images.contains(e)))
}

/// All matches of `rule` in `host` satisfying the gluing condition.
/// Matching is injective iff the rule asks for it.
pub fn find_matches(rule: &Rule, host: &Graph) -> Vec<Morphism> {
    enumerate_morphisms(&rule.lhs, host, rule.iso_match)
        .into_iter()
        .filter(|m| satisfies_gluing(rule, host, m))
        .collect()
}

fn fresh_id(prefix: char, host: &Graph, rule: &Rule, m_enc: &str, rhs_id: &str) -> String {
    let mut h = Sha256::new();
    h.update(host.digest());
    for part in [rule.name.as_str(), m_enc, rhs_id] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    let d = h.finalize();
    format!("{prefix}{}", hex::encode(&d[..8]))
}

/// Applies `rule` to `host` at `m`, returning the derived graph. The host is
/// not modified.
pub fn apply(rule: &Rule, host: &Graph, m: &Morphism) -> Result<Graph, RewriteError> {
    let invalid = |reason| RewriteError::InvalidMatch { rule: rule.name.clone(), reason };
    if !m.is_valid(&rule.lhs, host, LabelMode::Compatible) {
        return Err(invalid("not a morphism from the left-hand side"));
    }
    if rule.iso_match && !m.is_injective() {
        return Err(invalid("rule requires an injective match"));
    }
    if !satisfies_gluing(rule, host, m) {
        return Err(invalid("gluing condition violated"));
    }

    let deleted_nodes: BTreeSet<&NodeId> = rule.deleted_nodes().filter_map(|n| m.node(&n.id)).collect();
    let deleted_edges: BTreeSet<&EdgeId> = rule.deleted_edges().filter_map(|e| m.edge(&e.id)).collect();
    let enc = m.encode();

    let mut created: BTreeMap<&NodeId, NodeId> = BTreeMap::new();
    let mut nodes: Vec<Node> = host.nodes().iter().filter(|n| !deleted_nodes.contains(&n.id)).cloned().collect();
    for n in rule.created_nodes() {
        let id = NodeId(fresh_id('n', host, rule, &enc, &n.id.0));
        created.insert(&n.id, id.clone());
        nodes.push(Node { id, label: n.label.clone() });
    }
    let resolve = |rhs_node: &NodeId| -> NodeId {
        match created.get(rhs_node) {
            Some(id) => id.clone(),
            None => m.node(rhs_node).expect("interface node is matched").clone(),
        }
    };
    let mut edges: Vec<Edge> = host.edges().iter().filter(|e| !deleted_edges.contains(&e.id)).cloned().collect();
    for e in rule.created_edges() {
        edges.push(Edge {
            id: EdgeId(fresh_id('e', host, rule, &enc, &e.id.0)),
            src: resolve(&e.src),
            tgt: resolve(&e.tgt),
            label: e.label.clone(),
        });
    }
    Graph::new(nodes, edges).map_err(|source| RewriteError::Graph { rule: rule.name.clone(), source })
}

/// Every derivation of `host` by `rule` whose result satisfies all of
/// `constraints`, paired with its match, in match enumeration order.
/// Matches are applied in parallel; the result does not depend on it.
pub fn derive_all(rule: &Rule, host: &Graph, constraints: &[&Constraint]) -> Vec<(Morphism, Graph)> {
    find_matches(rule, host)
        .into_par_iter()
        .filter_map(|m| {
            let g = apply(rule, host, &m).expect("matches from find_matches are valid");
            constraints.iter().all(|k| satisfies(&g, k)).then_some((m, g))
        })
        .collect()
}

/// Single-threaded [`derive_all`], same result.
pub fn derive_all_sequential(rule: &Rule, host: &Graph, constraints: &[&Constraint]) -> Vec<(Morphism, Graph)> {
    find_matches(rule, host)
        .into_iter()
        .filter_map(|m| {
            let g = apply(rule, host, &m).ok()?;
            constraints.iter().all(|k| satisfies(&g, k)).then_some((m, g))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::isomorphic;

    fn g(b: crate::graph::GraphBuilder) -> Graph {
        b.build().unwrap()
    }

    #[test]
    fn interface_conflicts_rejected() {
        let l = g(Graph::builder().node("a", Some("X")));
        let r = g(Graph::builder().node("a", Some("Y")));
        assert!(matches!(Rule::new("r", l, r, false), Err(RuleError::NodeLabelConflict { .. })));
        let l = g(Graph::builder().node("a", None).node("b", None).edge("e", "a", "b", None));
        let r = g(Graph::builder().node("a", None).node("b", None).edge("e", "b", "a", None));
        assert!(matches!(Rule::new("r", l, r, false), Err(RuleError::EdgeConflict { .. })));
    }

    #[test]
    fn dangling_match_rejected() {
        let rule = Rule::new("del", g(Graph::builder().node("a", None)), Graph::empty(), false).unwrap();
        let host = g(Graph::builder().node("x", None).edge("l", "x", "x", None));
        assert!(find_matches(&rule, &host).is_empty());
        let bare = g(Graph::builder().node("x", None));
        assert_eq!(find_matches(&rule, &bare).len(), 1);
    }

    #[test]
    fn identification_violation_rejected() {
        // brute force: {a,b} -> {x} has the single map a,b -> x; a is deleted
        // and x has two preimages, so no match survives
        let lhs = g(Graph::builder().node("a", None).node("b", None));
        let rhs = g(Graph::builder().node("b", None));
        let rule = Rule::new("r", lhs, rhs, false).unwrap();
        let host = g(Graph::builder().node("x", None));
        assert_eq!(enumerate_morphisms(rule.lhs(), &host, false).len(), 1);
        assert!(find_matches(&rule, &host).is_empty());
    }

    #[test]
    fn identity_rule_preserves_graph() {
        let lhs = g(Graph::builder().node("a", None).node("b", None).edge("e", "a", "b", None));
        let rule = Rule::new("id", lhs.clone(), lhs, false).unwrap();
        let host = g(Graph::builder().node("x", Some("L")).node("y", None).edge("1", "x", "y", None).edge("2", "y", "x", None));
        for m in find_matches(&rule, &host) {
            let out = apply(&rule, &host, &m).unwrap();
            assert!(isomorphic(&out, &host));
        }
    }

    #[test]
    fn create_on_empty() {
        let rule = Rule::new("mk", Graph::empty(), g(Graph::builder().node("x", Some("X"))), false).unwrap();
        let ms = find_matches(&rule, &Graph::empty());
        assert_eq!(ms.len(), 1);
        let out = apply(&rule, &Graph::empty(), &ms[0]).unwrap();
        assert_eq!(out.node_count(), 1);
        assert_eq!(out.nodes()[0].label.as_deref(), Some("X"));
    }

    #[test]
    fn apply_is_deterministic_and_pure() {
        let rule = Rule::new(
            "grow",
            g(Graph::builder().node("a", None)),
            g(Graph::builder().node("a", None).node("b", Some("B")).edge("e", "a", "b", None)),
            false,
        )
        .unwrap();
        let host = g(Graph::builder().node("x", None).node("y", None));
        let before = host.canonical_bytes();
        for m in find_matches(&rule, &host) {
            let a = apply(&rule, &host, &m).unwrap();
            let b = apply(&rule, &host, &m).unwrap();
            assert_eq!(a.canonical_bytes(), b.canonical_bytes());
            assert_eq!(a.node_count(), 3);
        }
        assert_eq!(host.canonical_bytes(), before);
    }

    #[test]
    fn invalid_match_reported() {
        let rule = Rule::new("del", g(Graph::builder().node("a", None)), Graph::empty(), false).unwrap();
        let host = g(Graph::builder().node("x", None).edge("l", "x", "x", None));
        let mut m = Morphism::default();
        m.node_map.insert("a".into(), "x".into());
        assert!(matches!(apply(&rule, &host, &m), Err(RewriteError::InvalidMatch { .. })));
        m.node_map.insert("a".into(), "nope".into());
        assert!(matches!(apply(&rule, &host, &m), Err(RewriteError::InvalidMatch { .. })));
    }

    #[test]
    fn edge_and_node_deleted_together() {
        let lhs = g(Graph::builder().node("a", None).node("b", None).edge("e", "a", "b", None));
        let rhs = g(Graph::builder().node("b", None));
        let rule = Rule::new("cut", lhs, rhs, true).unwrap();
        let host = g(Graph::builder().node("x", None).node("y", None).edge("1", "x", "y", None));
        let ms = find_matches(&rule, &host);
        assert_eq!(ms.len(), 1);
        let out = apply(&rule, &host, &ms[0]).unwrap();
        assert_eq!(out.node_count(), 1);
        assert_eq!(out.edge_count(), 0);
    }

    #[test]
    fn no_match_no_derivation() {
        let rule = Rule::new("r", g(Graph::builder().node("a", Some("Q"))), Graph::empty(), false).unwrap();
        assert!(derive_all(&rule, &Graph::empty(), &[]).is_empty());
    }
}
