//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use gta::constraint::AtomicConstraint;
use gta::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

pub const FERRYMAN: &str = include_str!("../../fixtures/ferryman.gts");
pub const COUNTERS: &str = include_str!("../../fixtures/counters.gts");

pub fn ferryman() -> GtsDocument {
    parse_gts(FERRYMAN).expect("ferryman fixture parses")
}

pub fn counters() -> GtsDocument {
    parse_gts(COUNTERS).expect("counters fixture parses")
}

// ---------------------------------------------------------------- graphs

pub fn graph(nodes: &[(&str, Option<&str>)], edges: &[(&str, &str, &str, Option<&str>)]) -> Graph {
    let mut b = Graph::builder();
    for (id, l) in nodes {
        b = b.node(id, *l);
    }
    for (id, s, t, l) in edges {
        b = b.edge(id, s, t, *l);
    }
    b.build().expect("test graph is valid")
}

/// Random graph with at most `max_nodes` nodes and `max_edges` edges.
/// Labels are drawn from `labels`, where `None` means unlabeled.
pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize, labels: &[Option<&str>]) -> Graph {
    let n = rng.random_range(0..=max_nodes);
    let m = if n == 0 { 0 } else { rng.random_range(0..=max_edges) };
    let mut b = Graph::builder();
    for i in 0..n {
        b = b.node(&format!("v{i}"), *labels.choose(rng).unwrap());
    }
    for j in 0..m {
        let s = rng.random_range(0..n);
        let t = rng.random_range(0..n);
        b = b.edge(&format!("a{j}"), &format!("v{s}"), &format!("v{t}"), *labels.choose(rng).unwrap());
    }
    b.build().unwrap()
}

/// Same structure with shuffled, renamed node and edge ids.
pub fn permuted<R: Rng>(rng: &mut R, g: &Graph) -> Graph {
    let mut node_names: Vec<usize> = (0..g.node_count()).collect();
    node_names.shuffle(rng);
    let rename: BTreeMap<&NodeId, String> =
        g.nodes().iter().zip(&node_names).map(|(n, k)| (&n.id, format!("p{k}"))).collect();
    let mut edge_names: Vec<usize> = (0..g.edge_count()).collect();
    edge_names.shuffle(rng);
    let mut b = Graph::builder();
    for n in g.nodes() {
        b = b.node(&rename[&n.id], n.label.as_deref());
    }
    for (e, k) in g.edges().iter().zip(&edge_names) {
        b = b.edge(&format!("q{k}"), &rename[&e.src], &rename[&e.tgt], e.label.as_deref());
    }
    b.build().unwrap()
}

// ------------------------------------------------------------- morphisms

fn label_ok(pattern: &Option<String>, host: &Option<String>) -> bool {
    pattern.is_none() || pattern == host
}

fn injective<T: Ord>(values: impl Iterator<Item = T>) -> bool {
    let v: Vec<T> = values.collect();
    let s: BTreeSet<&T> = v.iter().collect();
    s.len() == v.len()
}

/// All tuples of length `k` over `0..n`.
fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

/// Every structure- and label-preserving map `pattern -> host`, found by
/// trying all node maps and all edge maps.
pub fn brute_morphisms(pattern: &Graph, host: &Graph, inj: bool) -> BTreeSet<Morphism> {
    let pn = pattern.nodes();
    let pe = pattern.edges();
    let hn = host.nodes();
    let he = host.edges();
    let mut out = BTreeSet::new();
    let edge_maps = tuples(he.len(), pe.len());
    for nm in tuples(hn.len(), pn.len()) {
        if !pn.iter().zip(&nm).all(|(p, &h)| label_ok(&p.label, &hn[h].label)) {
            continue;
        }
        if inj && !injective(nm.iter()) {
            continue;
        }
        let node_of = |id: &NodeId| &hn[nm[pn.iter().position(|n| &n.id == id).unwrap()]].id;
        for em in &edge_maps {
            let ok = pe.iter().zip(em).all(|(p, &h)| {
                let h = &he[h];
                label_ok(&p.label, &h.label) && node_of(&p.src) == &h.src && node_of(&p.tgt) == &h.tgt
            });
            if !ok || (inj && !injective(em.iter())) {
                continue;
            }
            let node_map = pn.iter().zip(&nm).map(|(p, &h)| (p.id.clone(), hn[h].id.clone())).collect();
            let edge_map = pe.iter().zip(em).map(|(p, &h)| (p.id.clone(), he[h].id.clone())).collect();
            out.insert(Morphism { node_map, edge_map });
        }
    }
    out
}

/// For every injective `h: I -> G` there is an injective `f: T -> G`
/// agreeing with `h` on the shared ids.
pub fn brute_satisfies_atomic(g: &Graph, premise: &Graph, conclusion: &Graph) -> bool {
    let fs = brute_morphisms(conclusion, g, true);
    brute_morphisms(premise, g, true).iter().all(|h| {
        fs.iter().any(|f| {
            h.node_map.iter().all(|(k, v)| f.node_map.get(k) == Some(v))
                && h.edge_map.iter().all(|(k, v)| f.edge_map.get(k) == Some(v))
        })
    })
}

pub fn brute_satisfies(g: &Graph, k: &Constraint) -> bool {
    match k {
        Constraint::Atomic(a) => brute_satisfies_atomic(g, a.premise(), a.conclusion()),
        Constraint::Not(k) => !brute_satisfies(g, k),
        Constraint::Or(a, b) => brute_satisfies(g, a) || brute_satisfies(g, b),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Exact isomorphism: some node bijection preserves labels and maps the
/// edge multiset (with labels) onto the other graph's.
pub fn brute_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.node_count() != b.node_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let an = a.nodes();
    let bn = b.nodes();
    let idx = |g: &Graph, id: &NodeId| g.nodes().iter().position(|n| &n.id == id).unwrap();
    let mut target: Vec<(usize, usize, Option<String>)> =
        b.edges().iter().map(|e| (idx(b, &e.src), idx(b, &e.tgt), e.label.clone())).collect();
    target.sort();
    permutations(an.len()).into_iter().any(|p| {
        if !an.iter().enumerate().all(|(i, n)| n.label == bn[p[i]].label) {
            return false;
        }
        let mut mapped: Vec<(usize, usize, Option<String>)> =
            a.edges().iter().map(|e| (p[idx(a, &e.src)], p[idx(a, &e.tgt)], e.label.clone())).collect();
        mapped.sort();
        mapped == target
    })
}

// -------------------------------------------------------------- ferryman

/// Bank of (wolf, goat, grape, ferryman); `true` = far bank.
pub type Placement = [bool; 4];

pub fn safe(p: Placement) -> bool {
    let [w, g, c, f] = p;
    !((w == g && f != w) || (g == c && f != g))
}

fn moves(p: Placement) -> Vec<Placement> {
    let f = p[3];
    let mut out = vec![];
    let mut alone = p;
    alone[3] = !f;
    out.push(alone);
    for item in 0..3 {
        if p[item] == f {
            let mut q = alone;
            q[item] = !f;
            out.push(q);
        }
    }
    out
}

pub struct BfsOracle {
    /// Depth at which each safe reachable placement is first seen.
    pub depth: BTreeMap<Placement, usize>,
}

impl BfsOracle {
    pub fn run() -> Self {
        let start = [false; 4];
        let mut depth = BTreeMap::from([(start, 0)]);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for q in moves(p) {
                if safe(q) && !depth.contains_key(&q) {
                    depth.insert(q, depth[&p] + 1);
                    queue.push_back(q);
                }
            }
        }
        BfsOracle { depth }
    }

    pub fn goal_depth(&self) -> Option<usize> {
        self.depth.get(&[true; 4]).copied()
    }
}

/// Reads the placement off a ferryman state graph.
pub fn placement(g: &Graph) -> Option<Placement> {
    let mut out = [false; 4];
    for (i, who) in ["Wolf", "Goat", "Grape", "Ferryman"].iter().enumerate() {
        let n = g.nodes().iter().find(|n| n.label.as_deref() == Some(*who))?;
        let at = g.edges().iter().find(|e| e.src == n.id && e.label.as_deref() == Some("is_at"))?;
        out[i] = g.node(&at.tgt)?.label.as_deref() == Some("Right");
    }
    Some(out)
}

// ------------------------------------------------------------- evaluation

/// Representatives of the isomorphism classes among `ids`.
pub fn iso_classes(store: &GraphStore, ids: impl IntoIterator<Item = GraphId>) -> Vec<GraphId> {
    let mut reps: Vec<GraphId> = Vec::new();
    for id in ids {
        let g = store.graph(id).unwrap();
        if !reps.iter().any(|r| isomorphic(store.graph(*r).unwrap(), g)) {
            reps.push(id);
        }
    }
    reps
}

/// True when the two id sets cover the same isomorphism classes.
pub fn same_classes(store: &GraphStore, a: &[GraphId], b: &[GraphId]) -> bool {
    let covered = |xs: &[GraphId], ys: &[GraphId]| {
        xs.iter().all(|x| ys.iter().any(|y| isomorphic(store.graph(*x).unwrap(), store.graph(*y).unwrap())))
    };
    covered(a, b) && covered(b, a)
}

pub fn exists(name: &str, g: Graph) -> Constraint {
    Constraint::Atomic(AtomicConstraint::exists(name, g))
}

// ------------------------------------------------------------ random GTS

pub const LABELS: &[Option<&str>] = &[Some("A"), Some("B"), None];

/// A rule over `LABELS` that may delete, keep and create elements.
pub fn random_rule<R: Rng>(rng: &mut R, name: &str) -> Rule {
    let lhs = random_graph(rng, 3, 2, LABELS);
    let lhs = rename(&lhs, "l");
    let mut b = Graph::builder();
    let mut kept = Vec::new();
    for n in lhs.nodes() {
        if rng.random_bool(0.6) {
            b = b.node(&n.id.0, n.label.as_deref());
            kept.push(n.id.0.clone());
        }
    }
    for e in lhs.edges() {
        if kept.contains(&e.src.0) && kept.contains(&e.tgt.0) && rng.random_bool(0.6) {
            b = b.edge(&e.id.0, &e.src.0, &e.tgt.0, e.label.as_deref());
        }
    }
    if rng.random_bool(0.5) {
        b = b.node("r0", *LABELS.choose(rng).unwrap());
        kept.push("r0".into());
    }
    if !kept.is_empty() && rng.random_bool(0.5) {
        let s = kept.choose(rng).unwrap().clone();
        let t = kept.choose(rng).unwrap().clone();
        b = b.edge("re0", &s, &t, *LABELS.choose(rng).unwrap());
    }
    Rule::new(name, lhs, b.build().unwrap(), rng.random_bool(0.5)).unwrap()
}

/// Prefixes every id of `g` with `p`.
pub fn rename(g: &Graph, p: &str) -> Graph {
    let mut b = Graph::builder();
    for n in g.nodes() {
        b = b.node(&format!("{p}{}", n.id), n.label.as_deref());
    }
    for e in g.edges() {
        b = b.edge(&format!("{p}{}", e.id), &format!("{p}{}", e.src), &format!("{p}{}", e.tgt), e.label.as_deref());
    }
    b.build().unwrap()
}

pub fn random_atomic<R: Rng>(rng: &mut R, name: &str) -> AtomicConstraint {
    let premise = rename(&random_graph(rng, 1, 0, LABELS), "i");
    let mut b = Graph::builder();
    let mut ids: Vec<String> = Vec::new();
    for n in premise.nodes() {
        b = b.node(&n.id.0, n.label.as_deref());
        ids.push(n.id.0.clone());
    }
    for k in 0..rng.random_range(0..=2) {
        let id = format!("t{k}");
        b = b.node(&id, *LABELS.choose(rng).unwrap());
        ids.push(id);
    }
    if !ids.is_empty() {
        for k in 0..rng.random_range(0..=2) {
            let s = ids.choose(rng).unwrap().clone();
            let t = ids.choose(rng).unwrap().clone();
            b = b.edge(&format!("te{k}"), &s, &t, *LABELS.choose(rng).unwrap());
        }
    }
    AtomicConstraint::new(name, premise, b.build().unwrap()).unwrap()
}

/// Three rules `r0..r2` and two constraints `c0!`, `c1!`.
pub fn random_gts<R: Rng>(rng: &mut R) -> GtsDocument {
    let mut doc = GtsDocument::new();
    for i in 0..3 {
        doc.add_rule(random_rule(rng, &format!("r{i}"))).unwrap();
    }
    for i in 0..2 {
        let name = format!("c{i}!");
        doc.add_constraint(name.clone(), gta::dsl::ConstraintDef::Atomic(random_atomic(rng, &name))).unwrap();
    }
    doc
}

pub fn random_ref<R: Rng>(rng: &mut R) -> ConstraintRef {
    let name = format!("c{}!", rng.random_range(0..2));
    if rng.random_bool(0.5) {
        ConstraintRef::negative(name)
    } else {
        ConstraintRef::positive(name)
    }
}

/// A loop-free program over the names of [`random_gts`].
pub fn random_program<R: Rng>(rng: &mut R, depth: usize) -> ProgramExpr {
    let leaf = depth == 0 || rng.random_bool(0.4);
    if leaf {
        return match rng.random_range(0..7) {
            0 | 1 => ProgramExpr::derive(format!("r{}", rng.random_range(0..3))),
            2 => ProgramExpr::check(random_ref(rng)),
            3 => ProgramExpr::Constrain(random_ref(rng)),
            4 => ProgramExpr::Unconstrain(random_ref(rng)),
            5 => ProgramExpr::select(rng.random_range(0..3), if rng.random_bool(0.5) { "nodes-asc" } else { "edges-desc" }),
            _ => {
                if rng.random_bool(0.5) {
                    ProgramExpr::Cut
                } else {
                    ProgramExpr::Distinct(None)
                }
            }
        };
    }
    let a = random_program(rng, depth - 1);
    let b = random_program(rng, depth - 1);
    if rng.random_bool(0.5) {
        ProgramExpr::seq(a, b)
    } else {
        ProgramExpr::alt(a, b)
    }
}

/// A grape of 1..=3 elements holding random graphs with at most 5 nodes.
pub fn random_grape<R: Rng>(rng: &mut R, store: &mut GraphStore) -> Grape {
    let len = rng.random_range(1..=3);
    let elements = (0..len)
        .map(|_| {
            (0..rng.random_range(0..=3))
                .map(|_| ConstrainedGraph::new(store.intern(random_graph(rng, 5, 4, LABELS))))
                .collect()
        })
        .collect();
    Grape::new(elements).unwrap()
}
