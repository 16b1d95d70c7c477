//! Graph constraints.
//!
//! An atomic constraint `I -c-> T` holds in `G` when every monomorphism
//! `h: I -> G` extends to a monomorphism `f: T -> G` with `h = f . c`.
//! Constraints close under negation and disjunction. Constraint matching is
//! always injective.

use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{exists_morphism, for_each_morphism, Graph, MatchOptions, Morphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("constraint `{constraint}`: premise element `{element}` is not embedded in the conclusion")]
    NotEmbedded { constraint: String, element: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicConstraint {
    name: String,
    premise: Graph,
    conclusion: Graph,
    embedding: Morphism,
}

impl AtomicConstraint {
    /// The embedding is the identity on ids shared by premise and conclusion;
    /// every premise element must appear in the conclusion with the same
    /// endpoints and a compatible label.
    pub fn new(name: impl Into<String>, premise: Graph, conclusion: Graph) -> Result<Self, ConstraintError> {
        let name = name.into();
        let embedding = Morphism::identity(&premise);
        if !embedding.is_valid(&premise, &conclusion, crate::graph::LabelMode::Compatible) {
            let bad_node = premise
                .nodes()
                .iter()
                .find(|n| conclusion.node(&n.id).is_none_or(|c| n.label.is_some() && c.label != n.label))
                .map(|n| n.id.0.clone());
            let bad_edge = || {
                premise
                    .edges()
                    .iter()
                    .find(|e| {
                        conclusion.edge(&e.id).is_none_or(|c| {
                            c.src != e.src || c.tgt != e.tgt || (e.label.is_some() && c.label != e.label)
                        })
                    })
                    .map(|e| e.id.0.clone())
            };
            let element = bad_node.or_else(bad_edge).unwrap_or_default();
            return Err(ConstraintError::NotEmbedded { constraint: name, element });
        }
        Ok(AtomicConstraint { name, premise, conclusion, embedding })
    }

    /// A basic (existence) constraint `∅ -> T`.
    pub fn exists(name: impl Into<String>, conclusion: Graph) -> Self {
        Self::new(name, Graph::empty(), conclusion).expect("empty premise embeds everywhere")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn premise(&self) -> &Graph {
        &self.premise
    }

    pub fn conclusion(&self) -> &Graph {
        &self.conclusion
    }

    pub fn embedding(&self) -> &Morphism {
        &self.embedding
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    Atomic(AtomicConstraint),
    Not(Box<Constraint>),
    Or(Box<Constraint>, Box<Constraint>),
}

impl Constraint {
    pub fn not(k: Constraint) -> Constraint {
        Constraint::Not(Box::new(k))
    }

    pub fn or(a: Constraint, b: Constraint) -> Constraint {
        Constraint::Or(Box::new(a), Box::new(b))
    }
}

/// A reference to a declared constraint, possibly negated (`name-`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ConstraintRef {
    pub name: String,
    pub negated: bool,
}

impl ConstraintRef {
    pub fn positive(name: impl Into<String>) -> Self {
        ConstraintRef { name: name.into(), negated: false }
    }

    pub fn negative(name: impl Into<String>) -> Self {
        ConstraintRef { name: name.into(), negated: true }
    }
}

impl fmt::Display for ConstraintRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, if self.negated { "-" } else { "" })
    }
}

impl From<ConstraintRef> for String {
    fn from(r: ConstraintRef) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for ConstraintRef {
    type Error = String;

    // Only used for snapshots, which always hold names written by Display.
    fn try_from(s: String) -> Result<Self, String> {
        if s.is_empty() || s == "-" {
            return Err("empty constraint reference".into());
        }
        Ok(match s.strip_suffix('-') {
            Some(base) => ConstraintRef::negative(base),
            None => ConstraintRef::positive(s),
        })
    }
}

/// `g ⊨ k`.
pub fn satisfies(g: &Graph, k: &Constraint) -> bool {
    match k {
        Constraint::Atomic(a) => satisfies_atomic(g, a),
        Constraint::Not(inner) => !satisfies(g, inner),
        Constraint::Or(a, b) => satisfies(g, a) || satisfies(g, b),
    }
}

fn satisfies_atomic(g: &Graph, a: &AtomicConstraint) -> bool {
    let mut ok = true;
    for_each_morphism(&a.premise, g, &MatchOptions::new(true), |h| {
        // seed f with h . c^-1 (c is the identity on shared ids)
        let seed = Morphism {
            node_map: a.embedding.node_map.iter().map(|(i, t)| (t.clone(), h.node_map[i].clone())).collect(),
            edge_map: a.embedding.edge_map.iter().map(|(i, t)| (t.clone(), h.edge_map[i].clone())).collect(),
        };
        let opts = MatchOptions { injective: true, seed: Some(&seed), ..Default::default() };
        if exists_morphism(&a.conclusion, g, &opts) {
            ControlFlow::Continue(())
        } else {
            ok = false;
            ControlFlow::Break(())
        }
    });
    ok
}
