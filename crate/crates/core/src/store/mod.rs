//! Interning graph store.
//!
//! Every graph produced during evaluation is interned here under a stable
//! [`GraphId`]. Bit-identical graphs share one id; isomorphic copies do not.
//! Graphs are indexed by certificate in an ordered map, so isomorphism
//! candidates are found by a logarithmic lookup followed by exact checks.
//! The store also keeps the derivation step log and named grapes, and
//! offers manual garbage collection and a full invariant audit.

mod snapshot;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::Grape;
use crate::graph::{compare, isomorphic, Certificate, Graph, GraphId, GraphOrder, GraphRef};
use crate::rewrite::DerivationStep;

pub use snapshot::{SnapshotError, SNAPSHOT_FORMAT, SNAPSHOT_VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("unknown grape `{0}`")]
    UnknownGrape(String),
    #[error("unknown graph id {0}")]
    UnknownGraph(GraphId),
}

#[derive(Default, Clone)]
pub struct GraphStore {
    graphs: BTreeMap<GraphId, Arc<Graph>>,
    by_digest: HashMap<[u8; 32], GraphId>,
    cert_index: BTreeMap<Certificate, BTreeSet<GraphId>>,
    steps: Vec<DerivationStep>,
    step_keys: HashSet<DerivationStep>,
    grapes: BTreeMap<String, Grape>,
    next_id: u64,
    // problems noticed while loading a snapshot; reported by `audit`
    load_issues: Vec<String>,
}

impl std::fmt::Debug for GraphStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphStore")
            .field("graphs", &self.graphs.len())
            .field("steps", &self.steps.len())
            .field("grapes", &self.grapes.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl GraphStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Stores `g` and returns its id. Idempotent for bit-identical graphs;
    /// isomorphic graphs with different ids get different store ids.
    pub fn intern(&mut self, g: Graph) -> GraphId {
        if let Some(&id) = self.by_digest.get(g.digest()) {
            return id;
        }
        let id = GraphId(self.next_id);
        self.next_id += 1;
        self.by_digest.insert(*g.digest(), id);
        self.cert_index.entry(*g.certificate()).or_default().insert(id);
        self.graphs.insert(id, Arc::new(g));
        id
    }

    pub fn get(&self, id: GraphId) -> Option<&Arc<Graph>> {
        self.graphs.get(&id)
    }

    pub fn graph(&self, id: GraphId) -> Result<&Graph, StoreError> {
        self.graphs.get(&id).map(|g| &**g).ok_or(StoreError::UnknownGraph(id))
    }

    pub fn ids(&self) -> impl Iterator<Item = GraphId> + '_ {
        self.graphs.keys().copied()
    }

    pub fn contains(&self, id: GraphId) -> bool {
        self.graphs.contains_key(&id)
    }

    /// Ids of stored graphs carrying exactly this certificate.
    pub fn with_certificate(&self, cert: &Certificate) -> impl Iterator<Item = GraphId> + '_ {
        self.cert_index.get(cert).into_iter().flatten().copied()
    }

    /// A stored graph in `scope` isomorphic to `g`, the smallest under
    /// `order` if there are several.
    pub fn find_isomorphic(&self, g: &Graph, scope: &BTreeSet<GraphId>, order: &dyn GraphOrder) -> Option<GraphId> {
        let bucket = self.cert_index.get(g.certificate())?;
        let candidates: Vec<GraphId> = if bucket.len() <= scope.len() {
            bucket.iter().filter(|id| scope.contains(id)).copied().collect()
        } else {
            scope.iter().filter(|id| bucket.contains(id)).copied().collect()
        };
        candidates
            .into_iter()
            .filter(|id| isomorphic(g, &self.graphs[id]))
            .min_by(|a, b| compare(order, GraphRef::interned(*a, &self.graphs[a]), GraphRef::interned(*b, &self.graphs[b])))
    }

    /// Appends a step unless the identical step is already logged.
    pub fn record_step(&mut self, step: DerivationStep) {
        if self.step_keys.insert(step.clone()) {
            self.steps.push(step);
        }
    }

    pub fn steps(&self) -> &[DerivationStep] {
        &self.steps
    }

    pub fn save_grape(&mut self, name: impl Into<String>, grape: Grape) {
        self.grapes.insert(name.into(), grape);
    }

    pub fn grape(&self, name: &str) -> Result<&Grape, StoreError> {
        self.grapes.get(name).ok_or_else(|| StoreError::UnknownGrape(name.to_owned()))
    }

    pub fn grape_names(&self) -> impl Iterator<Item = &str> {
        self.grapes.keys().map(String::as_str)
    }

    /// The full sequence of id sets of a named grape.
    pub fn history(&self, name: &str) -> Result<Vec<Vec<GraphId>>, StoreError> {
        Ok(self.grape(name)?.history())
    }

    /// Logged steps whose output occurs somewhere in the named grape, in
    /// derivation order.
    pub fn traces(&self, name: &str) -> Result<Vec<&DerivationStep>, StoreError> {
        let ids: BTreeSet<GraphId> = self.grape(name)?.graph_ids().collect();
        Ok(self.steps.iter().filter(|s| ids.contains(&s.output)).collect())
    }

    /// Removes every graph not reachable from the named root grapes, where
    /// reachability follows logged steps from outputs back to inputs.
    /// Non-root grapes and steps outside the closure are dropped. Returns
    /// the number of removed graphs.
    pub fn gc<S: AsRef<str>>(&mut self, roots: &[S]) -> Result<usize, StoreError> {
        let mut keep_grapes = BTreeMap::new();
        for r in roots {
            let name = r.as_ref();
            let g = self.grape(name)?.clone();
            keep_grapes.insert(name.to_owned(), g);
        }
        let mut by_output: HashMap<GraphId, Vec<usize>> = HashMap::new();
        for (i, s) in self.steps.iter().enumerate() {
            by_output.entry(s.output).or_default().push(i);
        }
        let mut reachable: BTreeSet<GraphId> = keep_grapes.values().flat_map(|g| g.graph_ids()).collect();
        let mut frontier: Vec<GraphId> = reachable.iter().copied().collect();
        while let Some(id) = frontier.pop() {
            for &i in by_output.get(&id).into_iter().flatten() {
                let input = self.steps[i].input;
                if reachable.insert(input) {
                    frontier.push(input);
                }
            }
        }
        let doomed: Vec<GraphId> = self.graphs.keys().filter(|id| !reachable.contains(id)).copied().collect();
        for id in &doomed {
            let g = self.graphs.remove(id).expect("listed id is stored");
            self.by_digest.remove(g.digest());
            if let Some(bucket) = self.cert_index.get_mut(g.certificate()) {
                bucket.remove(id);
                if bucket.is_empty() {
                    self.cert_index.remove(g.certificate());
                }
            }
        }
        self.steps.retain(|s| reachable.contains(&s.output) && reachable.contains(&s.input));
        self.step_keys = self.steps.iter().cloned().collect();
        self.grapes = keep_grapes;
        Ok(doomed.len())
    }

    /// Checks all store invariants. `replay` optionally re-applies logged
    /// steps through the given closure, which must return the re-derived
    /// graph (or `None` if the rule is unknown).
    pub fn audit(&self) -> AuditReport {
        self.audit_with(|_| None)
    }

    pub fn audit_with<F>(&self, replay: F) -> AuditReport
    where
        F: Fn(&DerivationStep) -> Option<Result<Graph, String>>,
    {
        let mut v = self.load_issues.clone();
        let mut digests: HashMap<[u8; 32], GraphId> = HashMap::new();
        for (id, g) in &self.graphs {
            if !g.has_no_dangling_edges() {
                v.push(format!("graph {id} has a dangling edge"));
            }
            if id.0 >= self.next_id {
                v.push(format!("graph {id} is not below the id counter {}", self.next_id));
            }
            if let Some(prev) = digests.insert(*g.digest(), *id) {
                v.push(format!("graphs {prev} and {id} are bit-identical"));
            }
            if self.by_digest.get(g.digest()) != Some(id) {
                v.push(format!("graph {id} missing from the digest index"));
            }
            if !self.cert_index.get(g.certificate()).is_some_and(|b| b.contains(id)) {
                v.push(format!("graph {id} missing from certificate bucket {}", g.certificate()));
            }
        }
        if self.by_digest.len() != self.graphs.len() {
            v.push("digest index size differs from graph count".into());
        }
        for (cert, bucket) in &self.cert_index {
            if bucket.is_empty() {
                v.push(format!("empty certificate bucket {cert}"));
            }
            for id in bucket {
                match self.graphs.get(id) {
                    None => v.push(format!("certificate index names unknown graph {id}")),
                    Some(g) if g.certificate() != cert => v.push(format!("graph {id} indexed under wrong certificate")),
                    _ => {}
                }
            }
        }
        for (i, s) in self.steps.iter().enumerate() {
            for end in [s.input, s.output] {
                if !self.graphs.contains_key(&end) {
                    v.push(format!("step {i} ({}) references unknown graph {end}", s.rule_name));
                }
            }
            if let (true, Some(output)) = (self.graphs.contains_key(&s.input), self.graphs.get(&s.output)) {
                match replay(s) {
                    None => {}
                    Some(Err(e)) => v.push(format!("step {i} ({}) does not replay: {e}", s.rule_name)),
                    Some(Ok(g)) if g.canonical_bytes() != output.canonical_bytes() => {
                        v.push(format!("step {i} ({}) replays to a different graph", s.rule_name))
                    }
                    Some(Ok(_)) => {}
                }
            }
        }
        for (name, grape) in &self.grapes {
            for id in grape.graph_ids() {
                if !self.graphs.contains_key(&id) {
                    v.push(format!("grape `{name}` references unknown graph {id}"));
                }
            }
        }
        AuditReport { violations: v }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}
