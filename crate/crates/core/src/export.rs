//! DOT and JSON renderings of grape histories, traces and single graphs.
//!
//! All output is byte-stable: identical stores give identical documents.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::graph::{Graph, GraphId};
use crate::rewrite::DerivationStep;
use crate::store::{GraphStore, StoreError};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct HistoryNode {
    pub element: usize,
    pub graph: GraphId,
}

/// A step drawn between two rows of a history.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct HistoryEdge {
    pub from: HistoryNode,
    pub to: HistoryNode,
    pub rule: String,
}

/// A grape history as a graph of graphs: one row per element, one edge per
/// derivation step connecting a graph to its source in an earlier row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HistoryGraph {
    pub grape: String,
    pub elements: Vec<Vec<GraphId>>,
    pub edges: Vec<HistoryEdge>,
}

impl HistoryGraph {
    pub fn build(store: &GraphStore, grape: &str) -> Result<HistoryGraph, StoreError> {
        let elements = store.history(grape)?;
        let rows: Vec<BTreeSet<GraphId>> = elements.iter().map(|r| r.iter().copied().collect()).collect();
        let mut edges = BTreeSet::new();
        for step in store.traces(grape)? {
            for (i, row) in rows.iter().enumerate() {
                if !row.contains(&step.output) {
                    continue;
                }
                // the latest earlier row holding the input
                if let Some(j) = (0..i).rev().find(|&j| rows[j].contains(&step.input)) {
                    edges.insert(HistoryEdge {
                        from: HistoryNode { element: j, graph: step.input },
                        to: HistoryNode { element: i, graph: step.output },
                        rule: step.rule_name.clone(),
                    });
                }
            }
        }
        Ok(HistoryGraph { grape: grape.to_owned(), elements, edges: edges.into_iter().collect() })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph {} {{", quote(&self.grape));
        s.push_str("  rankdir=LR;\n  node [shape=box];\n");
        for (i, row) in self.elements.iter().enumerate() {
            let _ = writeln!(s, "  subgraph cluster_{i} {{");
            let _ = writeln!(s, "    label=\"element {i}\";");
            for id in row {
                let _ = writeln!(s, "    e{i}_g{id} [label=\"{id}\"];", id = id.0);
            }
            s.push_str("  }\n");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  e{}_g{} -> e{}_g{} [label={}];",
                e.from.element,
                e.from.graph.0,
                e.to.element,
                e.to.graph.0,
                quote(&e.rule)
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("history serializes")
    }
}

/// `(rule, input, output)` triple of a logged step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub rule: String,
    pub input: GraphId,
    pub output: GraphId,
}

impl From<&DerivationStep> for TraceEntry {
    fn from(s: &DerivationStep) -> Self {
        TraceEntry { rule: s.rule_name.clone(), input: s.input, output: s.output }
    }
}

pub fn traces(store: &GraphStore, grape: &str) -> Result<Vec<TraceEntry>, StoreError> {
    Ok(store.traces(grape)?.into_iter().map(TraceEntry::from).collect())
}

pub fn traces_json(store: &GraphStore, grape: &str) -> Result<String, StoreError> {
    Ok(serde_json::to_string_pretty(&traces(store, grape)?).expect("traces serialize"))
}

pub fn history_dot(store: &GraphStore, grape: &str) -> Result<String, StoreError> {
    Ok(HistoryGraph::build(store, grape)?.to_dot())
}

pub fn history_json(store: &GraphStore, grape: &str) -> Result<String, StoreError> {
    Ok(HistoryGraph::build(store, grape)?.to_json())
}

/// A single graph in DOT; node and edge labels are shown after their ids.
pub fn graph_dot(name: &str, g: &Graph) -> String {
    let show = |id: &str, label: &Option<String>| match label {
        Some(l) => quote(&format!("{id}:{l}")),
        None => quote(id),
    };
    let mut s = String::new();
    let _ = writeln!(s, "digraph {} {{", quote(name));
    for n in g.nodes() {
        let _ = writeln!(s, "  {} [label={}];", quote(&n.id.0), show(&n.id.0, &n.label));
    }
    for e in g.edges() {
        let _ = writeln!(s, "  {} -> {} [label={}];", quote(&e.src.0), quote(&e.tgt.0), show(&e.id.0, &e.label));
    }
    s.push_str("}\n");
    s
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
