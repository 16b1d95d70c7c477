use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::ConstraintRef;
use crate::graph::GraphId;

/// An interned graph with the set of constraints it is known to satisfy.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConstrainedGraph {
    pub graph: GraphId,
    pub constraints: BTreeSet<ConstraintRef>,
}

impl ConstrainedGraph {
    /// An unconstrained graph.
    pub fn new(graph: GraphId) -> Self {
        ConstrainedGraph { graph, constraints: BTreeSet::new() }
    }

    pub fn with_constraints(graph: GraphId, constraints: BTreeSet<ConstraintRef>) -> Self {
        ConstrainedGraph { graph, constraints }
    }
}

/// One grape element: a finite set of constrained graphs.
pub type Element = BTreeSet<ConstrainedGraph>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("a grape must have at least one element")]
pub struct EmptyGrape;

/// A non-empty sequence of graph sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Element>", into = "Vec<Element>")]
pub struct Grape {
    elements: Vec<Element>,
}

impl Grape {
    pub fn new(elements: Vec<Element>) -> Result<Grape, EmptyGrape> {
        if elements.is_empty() {
            Err(EmptyGrape)
        } else {
            Ok(Grape { elements })
        }
    }

    pub fn single(element: Element) -> Grape {
        Grape { elements: vec![element] }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> &Element {
        self.elements.last().expect("grapes are non-empty")
    }

    pub fn prefix(&self) -> &[Element] {
        &self.elements[..self.elements.len() - 1]
    }

    pub fn with_last(&self, last: Element) -> Grape {
        let mut elements = self.elements.clone();
        *elements.last_mut().expect("non-empty") = last;
        Grape { elements }
    }

    pub fn appended(&self, next: Element) -> Grape {
        let mut elements = self.elements.clone();
        elements.push(next);
        Grape { elements }
    }

    /// Every graph id mentioned anywhere in the grape, possibly repeated.
    pub fn graph_ids(&self) -> impl Iterator<Item = GraphId> + '_ {
        self.elements.iter().flatten().map(|cg| cg.graph)
    }

    /// Sorted, de-duplicated ids per element.
    pub fn history(&self) -> Vec<Vec<GraphId>> {
        self.elements
            .iter()
            .map(|e| {
                let ids: BTreeSet<GraphId> = e.iter().map(|cg| cg.graph).collect();
                ids.into_iter().collect()
            })
            .collect()
    }

    pub fn last_ids(&self) -> Vec<GraphId> {
        let ids: BTreeSet<GraphId> = self.last().iter().map(|cg| cg.graph).collect();
        ids.into_iter().collect()
    }
}

impl TryFrom<Vec<Element>> for Grape {
    type Error = EmptyGrape;

    fn try_from(v: Vec<Element>) -> Result<Self, EmptyGrape> {
        Grape::new(v)
    }
}

impl From<Grape> for Vec<Element> {
    fn from(g: Grape) -> Self {
        g.elements
    }
}
