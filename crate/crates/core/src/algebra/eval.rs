//! Evaluation of program expressions over grapes.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use super::{ConstrainedGraph, Element, Grape, ProgramExpr};
use crate::constraint::{satisfies, Constraint, ConstraintRef};
use crate::dsl::GtsDocument;
use crate::graph::{compare, isomorphic, Certificate, Graph, GraphId, GraphOrder, GraphRef, Morphism, OrderRegistry};
use crate::rewrite::{derive_all, derive_all_sequential, DerivationStep};
use crate::store::{GraphStore, StoreError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("iteration cap of {0} reached in loop or search")]
    DivergenceGuard(usize),
    #[error("unknown graph order `{0}`")]
    UnknownOrder(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("unknown constraint `{0}`")]
    UnknownConstraint(String),
    #[error("unknown program `{0}`")]
    UnknownProgram(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalConfig {
    /// Maximum number of body evaluations per loop or search.
    pub max_iterations: usize,
    /// Order used by `Distinct(None)`.
    pub default_order: String,
    /// Fan derive work out over worker threads.
    pub parallel: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { max_iterations: 10_000, default_order: OrderRegistry::DEFAULT.to_owned(), parallel: true }
    }
}

/// Evaluates programs of a GTS, interning every produced graph into a store.
pub struct Evaluator<'a> {
    gts: &'a GtsDocument,
    store: &'a mut GraphStore,
    orders: OrderRegistry,
    config: EvalConfig,
}

impl<'a> Evaluator<'a> {
    pub fn new(gts: &'a GtsDocument, store: &'a mut GraphStore) -> Self {
        Evaluator { gts, store, orders: OrderRegistry::builtin(), config: EvalConfig::default() }
    }

    pub fn with_config(mut self, config: EvalConfig) -> Self {
        self.config = config;
        self
    }

    pub fn with_orders(mut self, orders: OrderRegistry) -> Self {
        self.orders = orders;
        self
    }

    pub fn config(&self) -> &EvalConfig {
        &self.config
    }

    pub fn store(&self) -> &GraphStore {
        self.store
    }

    /// `⟨{(∅, ∅)}⟩`, with the empty graph interned.
    pub fn star(&mut self) -> Grape {
        let id = self.store.intern(Graph::empty());
        Grape::single([ConstrainedGraph::new(id)].into())
    }

    /// Runs a named program on the star grape.
    pub fn run_program(&mut self, name: &str) -> Result<Grape, EvalError> {
        let p = self.gts.program(name).ok_or_else(|| EvalError::UnknownProgram(name.to_owned()))?;
        let start = self.star();
        self.eval(p, &start)
    }

    pub fn eval(&mut self, p: &ProgramExpr, g: &Grape) -> Result<Grape, EvalError> {
        match p {
            ProgramExpr::Constrain(c) => self.constrain(c, g),
            ProgramExpr::Unconstrain(c) => Ok(self.unconstrain(c, g)),
            ProgramExpr::Derive(r) => self.derive(r, g),
            ProgramExpr::Select { k, order } => self.select(*k, order, g),
            ProgramExpr::Seq(a, b) => {
                let mid = self.eval(a, g)?;
                self.eval(b, &mid)
            }
            ProgramExpr::Alt(a, b) => self.alt(a, b, g),
            ProgramExpr::Loop(e) => self.looped(e, g),
            ProgramExpr::Search(c, e) => self.search(c, e, g),
            ProgramExpr::Cut => Ok(cut(g)),
            ProgramExpr::Distinct(order) => self.distinct(order.as_deref(), g),
            ProgramExpr::Star => Ok(self.star()),
        }
    }

    fn constraint(&self, c: &ConstraintRef) -> Result<&'a Constraint, EvalError> {
        self.gts.constraint(c).ok_or_else(|| EvalError::UnknownConstraint(c.to_string()))
    }

    fn order(&self, name: Option<&str>) -> Result<Arc<dyn GraphOrder>, EvalError> {
        let name = name.unwrap_or(&self.config.default_order);
        self.orders.get(name).map_err(|e| EvalError::UnknownOrder(e.0))
    }

    fn holds(&self, id: GraphId, c: &ConstraintRef) -> Result<bool, EvalError> {
        let k = self.constraint(c)?;
        Ok(satisfies(self.store.graph(id)?, k))
    }

    /// Keeps graphs of the last element that satisfy `c` and records `c`.
    pub fn constrain(&mut self, c: &ConstraintRef, g: &Grape) -> Result<Grape, EvalError> {
        let mut last = Element::new();
        for cg in g.last() {
            if self.holds(cg.graph, c)? {
                let mut cg = cg.clone();
                cg.constraints.insert(c.clone());
                last.insert(cg);
            }
        }
        Ok(g.with_last(last))
    }

    /// Drops `c` from the constraint sets of the last element.
    pub fn unconstrain(&self, c: &ConstraintRef, g: &Grape) -> Grape {
        let last = g
            .last()
            .iter()
            .map(|cg| {
                let mut cg = cg.clone();
                cg.constraints.remove(c);
                cg
            })
            .collect();
        g.with_last(last)
    }

    /// Appends every constraint-preserving derivation of the last element.
    pub fn derive(&mut self, rule_name: &str, g: &Grape) -> Result<Grape, EvalError> {
        let rule = self.gts.rule(rule_name).ok_or_else(|| EvalError::UnknownRule(rule_name.to_owned()))?;
        let mut inputs: Vec<(&ConstrainedGraph, Arc<Graph>, Vec<&Constraint>)> = Vec::new();
        for cg in g.last() {
            let host = self.store.get(cg.graph).cloned().ok_or(StoreError::UnknownGraph(cg.graph))?;
            let ks = cg.constraints.iter().map(|c| self.constraint(c)).collect::<Result<Vec<_>, _>>()?;
            inputs.push((cg, host, ks));
        }
        let results: Vec<Vec<(Morphism, Graph)>> = if self.config.parallel {
            inputs.par_iter().map(|(_, host, ks)| derive_all(rule, host, ks)).collect()
        } else {
            inputs.iter().map(|(_, host, ks)| derive_all_sequential(rule, host, ks)).collect()
        };
        let mut next = Element::new();
        for ((cg, _, _), derived) in inputs.iter().zip(results) {
            for (m, out) in derived {
                let id = self.store.intern(out);
                self.store.record_step(DerivationStep {
                    rule_name: rule_name.to_owned(),
                    matching: m,
                    input: cg.graph,
                    output: id,
                });
                next.insert(ConstrainedGraph::with_constraints(id, cg.constraints.clone()));
            }
        }
        Ok(g.appended(next))
    }

    fn cmp_cg(&self, order: &dyn GraphOrder, a: &ConstrainedGraph, b: &ConstrainedGraph) -> Ordering {
        let ga = &self.store.get(a.graph).expect("grape graphs are stored");
        let gb = &self.store.get(b.graph).expect("grape graphs are stored");
        compare(order, GraphRef::interned(a.graph, ga), GraphRef::interned(b.graph, gb))
            .then_with(|| a.constraints.cmp(&b.constraints))
    }

    fn check_stored(&self, g: &Grape) -> Result<(), EvalError> {
        for id in g.graph_ids() {
            if !self.store.contains(id) {
                return Err(StoreError::UnknownGraph(id).into());
            }
        }
        Ok(())
    }

    /// Reduces the last element to its `k` maximal graphs under `order`.
    pub fn select(&mut self, k: usize, order: &str, g: &Grape) -> Result<Grape, EvalError> {
        let order = self.order(Some(order))?;
        if g.last().len() <= k {
            return Ok(g.clone());
        }
        self.check_stored(g)?;
        let mut items: Vec<&ConstrainedGraph> = g.last().iter().collect();
        items.sort_by(|a, b| self.cmp_cg(&*order, b, a));
        let last = items.into_iter().take(k).cloned().collect();
        Ok(g.with_last(last))
    }

    /// Both branches run on `g`; the union of their last elements is
    /// appended to `g`.
    pub fn alt(&mut self, a: &ProgramExpr, b: &ProgramExpr, g: &Grape) -> Result<Grape, EvalError> {
        let left = self.eval(a, g)?;
        let right = self.eval(b, g)?;
        let mut union = left.last().clone();
        union.extend(right.last().iter().cloned());
        Ok(g.appended(union))
    }

    /// Re-applies `e` while its result has a non-empty last element and
    /// returns the last grape before the empty one.
    pub fn looped(&mut self, e: &ProgramExpr, g: &Grape) -> Result<Grape, EvalError> {
        let mut current = g.clone();
        for _ in 0..self.config.max_iterations {
            let next = self.eval(e, &current)?;
            if next.last().is_empty() {
                return Ok(current);
            }
            current = next;
        }
        Err(EvalError::DivergenceGuard(self.config.max_iterations))
    }

    /// Re-applies `e` until the last element is empty or contains a graph
    /// satisfying `c`.
    pub fn search(&mut self, c: &ConstraintRef, e: &ProgramExpr, g: &Grape) -> Result<Grape, EvalError> {
        let mut current = g.clone();
        let mut iterations = 0;
        loop {
            if current.last().is_empty() {
                return Ok(current);
            }
            for cg in current.last() {
                if self.holds(cg.graph, c)? {
                    return Ok(current);
                }
            }
            if iterations == self.config.max_iterations {
                return Err(EvalError::DivergenceGuard(self.config.max_iterations));
            }
            iterations += 1;
            current = self.eval(e, &current)?;
        }
    }

    /// Removes from the last element every graph isomorphic to a graph in
    /// an earlier element, or to a strictly smaller graph of the last
    /// element. Constraint sets are ignored for isomorphism.
    pub fn distinct(&mut self, order: Option<&str>, g: &Grape) -> Result<Grape, EvalError> {
        let order = self.order(order)?;
        self.check_stored(g)?;
        let history: BTreeSet<GraphId> = g.prefix().iter().flatten().map(|cg| cg.graph).collect();
        let mut items: Vec<&ConstrainedGraph> = g.last().iter().collect();
        items.sort_by(|a, b| self.cmp_cg(&*order, a, b));
        let mut classes: HashMap<Certificate, Vec<GraphId>> = HashMap::new();
        let mut last = Element::new();
        for cg in items {
            let graph = self.store.graph(cg.graph)?;
            let reps = classes.entry(*graph.certificate()).or_default();
            let seen_here = reps.iter().any(|r| *r == cg.graph || isomorphic(graph, self.store.get(*r).expect("stored")));
            if seen_here {
                continue;
            }
            reps.push(cg.graph);
            if self.store.find_isomorphic(graph, &history, &*order).is_none() {
                last.insert(cg.clone());
            }
        }
        Ok(g.with_last(last))
    }
}

/// Keeps only the last element.
pub fn cut(g: &Grape) -> Grape {
    Grape::single(g.last().clone())
}
