//! Graph morphism enumeration by backtracking.
//!
//! Pattern nodes are assigned in order of (degree desc, id asc). A node
//! candidate is accepted only if every pattern edge between it and already
//! assigned nodes has at least one compatible host edge. Edges are assigned
//! after all nodes, in pattern edge id order, so parallel host edges yield
//! one morphism per choice.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::{EdgeId, Graph, NodeId};

/// Structure- and label-preserving map from a pattern graph into a host.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Morphism {
    pub node_map: BTreeMap<NodeId, NodeId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl Morphism {
    pub fn identity(g: &Graph) -> Morphism {
        Morphism {
            node_map: g.nodes().iter().map(|n| (n.id.clone(), n.id.clone())).collect(),
            edge_map: g.edges().iter().map(|e| (e.id.clone(), e.id.clone())).collect(),
        }
    }

    pub fn node(&self, id: &NodeId) -> Option<&NodeId> {
        self.node_map.get(id)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&EdgeId> {
        self.edge_map.get(id)
    }

    pub fn is_injective(&self) -> bool {
        let mut nodes: Vec<_> = self.node_map.values().collect();
        nodes.sort();
        let mut edges: Vec<_> = self.edge_map.values().collect();
        edges.sort();
        nodes.windows(2).all(|w| w[0] != w[1]) && edges.windows(2).all(|w| w[0] != w[1])
    }

    /// Canonical text encoding, used as input to fresh-id hashing.
    pub fn encode(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.node_map {
            out.push_str(&format!("n:{}>{};", k.0.len(), k.0));
            out.push_str(&format!("{}:{}|", v.0.len(), v.0));
        }
        for (k, v) in &self.edge_map {
            out.push_str(&format!("e:{}>{};", k.0.len(), k.0));
            out.push_str(&format!("{}:{}|", v.0.len(), v.0));
        }
        out
    }

    /// Checks totality, structure preservation and labels against the
    /// given graphs.
    pub fn is_valid(&self, pattern: &Graph, host: &Graph, labels: LabelMode) -> bool {
        if self.node_map.len() != pattern.node_count() || self.edge_map.len() != pattern.edge_count() {
            return false;
        }
        for n in pattern.nodes() {
            let Some(h) = self.node_map.get(&n.id).and_then(|h| host.node(h)) else {
                return false;
            };
            if !labels.accepts(n.label.as_deref(), h.label.as_deref()) {
                return false;
            }
        }
        for e in pattern.edges() {
            let Some(h) = self.edge_map.get(&e.id).and_then(|h| host.edge(h)) else {
                return false;
            };
            if !labels.accepts(e.label.as_deref(), h.label.as_deref())
                || self.node_map.get(&e.src) != Some(&h.src)
                || self.node_map.get(&e.tgt) != Some(&h.tgt)
            {
                return false;
            }
        }
        true
    }
}

/// How pattern labels constrain host labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LabelMode {
    /// A labeled pattern element needs an equal host label; an unlabeled one
    /// matches anything.
    #[default]
    Compatible,
    /// Labels must be equal, including absence.
    Exact,
}

impl LabelMode {
    pub fn accepts(self, pattern: Option<&str>, host: Option<&str>) -> bool {
        match self {
            LabelMode::Compatible => pattern.is_none() || pattern == host,
            LabelMode::Exact => pattern == host,
        }
    }
}

type NodeFilter<'a> = &'a (dyn Fn(usize, usize) -> bool + Sync);

#[derive(Clone, Copy, Default)]
pub struct MatchOptions<'a> {
    pub injective: bool,
    pub labels: LabelMode,
    /// Partial assignment every result must extend.
    pub seed: Option<&'a Morphism>,
    /// Extra predicate on (pattern node index, host node index).
    pub node_filter: Option<NodeFilter<'a>>,
}

impl<'a> MatchOptions<'a> {
    pub fn new(injective: bool) -> Self {
        MatchOptions { injective, ..Default::default() }
    }
}

/// All morphisms `pattern -> host`, in deterministic enumeration order.
pub fn enumerate_morphisms(pattern: &Graph, host: &Graph, injective: bool) -> Vec<Morphism> {
    let mut out = Vec::new();
    for_each_morphism(pattern, host, &MatchOptions::new(injective), |m| {
        out.push(m.clone());
        ControlFlow::Continue(())
    });
    out
}

pub fn exists_morphism(pattern: &Graph, host: &Graph, opts: &MatchOptions<'_>) -> bool {
    let mut found = false;
    for_each_morphism(pattern, host, opts, |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

/// Drives `visit` over every morphism; stops early on `Break`.
pub fn for_each_morphism<F>(pattern: &Graph, host: &Graph, opts: &MatchOptions<'_>, mut visit: F)
where
    F: FnMut(&Morphism) -> ControlFlow<()>,
{
    if opts.injective
        && (pattern.node_count() > host.node_count() || pattern.edge_count() > host.edge_count())
    {
        return;
    }
    let Some(mut m) = Matcher::new(pattern, host, opts) else {
        return;
    };
    let _ = m.assign_nodes(0, &mut visit);
}

struct Matcher<'a> {
    pattern: &'a Graph,
    host: &'a Graph,
    opts: &'a MatchOptions<'a>,
    order: Vec<usize>,
    node_map: Vec<Option<usize>>,
    node_used: Vec<u32>,
    edge_map: Vec<Option<usize>>,
    edge_used: Vec<u32>,
    free_edges: Vec<usize>,
}

impl<'a> Matcher<'a> {
    fn new(pattern: &'a Graph, host: &'a Graph, opts: &'a MatchOptions<'a>) -> Option<Self> {
        let mut m = Matcher {
            pattern,
            host,
            opts,
            order: Vec::new(),
            node_map: vec![None; pattern.node_count()],
            node_used: vec![0; host.node_count()],
            edge_map: vec![None; pattern.edge_count()],
            edge_used: vec![0; host.edge_count()],
            free_edges: Vec::new(),
        };
        if let Some(seed) = opts.seed {
            for (p, h) in &seed.node_map {
                let (p, h) = (pattern.node_idx(p)?, host.node_idx(h)?);
                if !m.node_ok(p, h) {
                    return None;
                }
                m.node_map[p] = Some(h);
                m.node_used[h] += 1;
            }
            for (p, h) in &seed.edge_map {
                let (p, h) = (pattern.edge_idx(p)?, host.edge_idx(h)?);
                if !m.edge_ok(p, h) {
                    return None;
                }
                m.edge_map[p] = Some(h);
                m.edge_used[h] += 1;
            }
            // seeded edges must agree with seeded nodes where both are present
            for (p, h) in m.edge_map.iter().enumerate() {
                if let Some(h) = *h {
                    let (ps, pt) = pattern.ends(p);
                    let (hs, ht) = host.ends(h);
                    if m.node_map[ps].is_some_and(|x| x != hs) || m.node_map[pt].is_some_and(|x| x != ht) {
                        return None;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..pattern.node_count()).filter(|&p| m.node_map[p].is_none()).collect();
        let degree = |p: usize| pattern.out_edges(p).len() + pattern.in_edges(p).len();
        order.sort_by(|&a, &b| degree(b).cmp(&degree(a)).then(a.cmp(&b)));
        m.order = order;
        m.free_edges = (0..pattern.edge_count()).filter(|&e| m.edge_map[e].is_none()).collect();
        Some(m)
    }

    fn node_ok(&self, p: usize, h: usize) -> bool {
        let pn = &self.pattern.nodes()[p];
        let hn = &self.host.nodes()[h];
        self.opts.labels.accepts(pn.label.as_deref(), hn.label.as_deref())
            && (!self.opts.injective || self.node_used[h] == 0)
            && self.opts.node_filter.is_none_or(|f| f(p, h))
    }

    fn edge_ok(&self, p: usize, h: usize) -> bool {
        let pe = &self.pattern.edges()[p];
        let he = &self.host.edges()[h];
        self.opts.labels.accepts(pe.label.as_deref(), he.label.as_deref())
            && (!self.opts.injective || self.edge_used[h] == 0)
    }

    fn host_edges_between(&self, hs: usize, ht: usize) -> impl Iterator<Item = usize> + '_ {
        self.host.out_edges(hs).iter().copied().filter(move |&e| self.host.ends(e).1 == ht)
    }

    /// Every pattern edge between `p` and assigned nodes has a candidate.
    fn edges_feasible(&self, p: usize) -> bool {
        let check = |e: usize| {
            if self.edge_map[e].is_some() {
                return true;
            }
            let (s, t) = self.pattern.ends(e);
            match (self.node_map[s], self.node_map[t]) {
                (Some(hs), Some(ht)) => self.host_edges_between(hs, ht).any(|he| self.edge_ok(e, he)),
                _ => true,
            }
        };
        self.pattern.out_edges(p).iter().all(|&e| check(e)) && self.pattern.in_edges(p).iter().all(|&e| check(e))
    }

    fn assign_nodes<F>(&mut self, depth: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&Morphism) -> ControlFlow<()>,
    {
        if depth == self.order.len() {
            return self.assign_edges(0, visit);
        }
        let p = self.order[depth];
        for h in 0..self.host.node_count() {
            if !self.node_ok(p, h) {
                continue;
            }
            self.node_map[p] = Some(h);
            self.node_used[h] += 1;
            let flow = if self.edges_feasible(p) { self.assign_nodes(depth + 1, visit) } else { ControlFlow::Continue(()) };
            self.node_used[h] -= 1;
            self.node_map[p] = None;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn assign_edges<F>(&mut self, depth: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&Morphism) -> ControlFlow<()>,
    {
        if depth == self.free_edges.len() {
            return visit(&self.snapshot());
        }
        let e = self.free_edges[depth];
        let (s, t) = self.pattern.ends(e);
        let (hs, ht) = (self.node_map[s].expect("nodes assigned"), self.node_map[t].expect("nodes assigned"));
        let candidates: Vec<usize> = self.host_edges_between(hs, ht).collect();
        for he in candidates {
            if !self.edge_ok(e, he) {
                continue;
            }
            self.edge_map[e] = Some(he);
            self.edge_used[he] += 1;
            let flow = self.assign_edges(depth + 1, visit);
            self.edge_used[he] -= 1;
            self.edge_map[e] = None;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn snapshot(&self) -> Morphism {
        let node_map = self
            .node_map
            .iter()
            .enumerate()
            .map(|(p, h)| {
                (self.pattern.nodes()[p].id.clone(), self.host.nodes()[h.expect("total")].id.clone())
            })
            .collect();
        let edge_map = self
            .edge_map
            .iter()
            .enumerate()
            .map(|(p, h)| {
                (self.pattern.edges()[p].id.clone(), self.host.edges()[h.expect("total")].id.clone())
            })
            .collect();
        Morphism { node_map, edge_map }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nodes(ids: &[&str]) -> Graph {
        ids.iter().fold(Graph::builder(), |b, id| b.node(id, None)).build().unwrap()
    }

    #[test]
    fn empty_pattern_has_one_morphism() {
        let host = Graph::builder().node("a", Some("X")).edge("e", "a", "a", None).build().unwrap();
        let ms = enumerate_morphisms(&Graph::empty(), &host, true);
        assert_eq!(ms, vec![Morphism::default()]);
        assert_eq!(enumerate_morphisms(&Graph::empty(), &Graph::empty(), false).len(), 1);
    }

    #[test]
    fn single_node_into_two() {
        assert_eq!(enumerate_morphisms(&nodes(&["p"]), &nodes(&["a", "b"]), false).len(), 2);
        assert_eq!(enumerate_morphisms(&nodes(&["p"]), &nodes(&["a", "b"]), true).len(), 2);
    }

    #[test]
    fn two_nodes_into_one() {
        // brute force: node maps {p,q} -> {a} number 1^2 = 1, none injective
        let p = nodes(&["p", "q"]);
        let h = nodes(&["a"]);
        assert_eq!(enumerate_morphisms(&p, &h, false).len(), 1);
        assert_eq!(enumerate_morphisms(&p, &h, true).len(), 0);
    }

    #[test]
    fn labels_constrain_only_when_present() {
        let p = Graph::builder().node("p", Some("X")).build().unwrap();
        let h = Graph::builder().node("a", Some("X")).node("b", Some("Y")).node("c", None).build().unwrap();
        let ms = enumerate_morphisms(&p, &h, false);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].node(&"p".into()), Some(&NodeId::from("a")));
        assert_eq!(enumerate_morphisms(&nodes(&["p"]), &h, false).len(), 3);
    }

    #[test]
    fn parallel_edges_multiply() {
        let p = Graph::builder().node("x", None).node("y", None).edge("e", "x", "y", None).build().unwrap();
        let h = Graph::builder()
            .node("a", None)
            .node("b", None)
            .edge("1", "a", "b", None)
            .edge("2", "a", "b", None)
            .build()
            .unwrap();
        let ms = enumerate_morphisms(&p, &h, true);
        assert_eq!(ms.len(), 2);
        assert!(ms.iter().all(|m| m.is_valid(&p, &h, LabelMode::Compatible)));
    }

    #[test]
    fn loop_maps_only_to_loop() {
        let p = Graph::builder().node("x", None).edge("l", "x", "x", None).build().unwrap();
        let h = Graph::builder()
            .node("a", None)
            .node("b", None)
            .edge("1", "a", "b", None)
            .edge("2", "b", "b", None)
            .build()
            .unwrap();
        let ms = enumerate_morphisms(&p, &h, false);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].node(&"x".into()), Some(&NodeId::from("b")));
    }

    #[test]
    fn seeded_search_extends_seed() {
        let p = nodes(&["p", "q"]);
        let h = nodes(&["a", "b", "c"]);
        let mut seed = Morphism::default();
        seed.node_map.insert("p".into(), "b".into());
        let opts = MatchOptions { injective: true, seed: Some(&seed), ..Default::default() };
        let mut found = Vec::new();
        for_each_morphism(&p, &h, &opts, |m| {
            found.push(m.clone());
            ControlFlow::Continue(())
        });
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|m| m.node(&"p".into()) == Some(&NodeId::from("b"))));
    }

    #[test]
    fn enumeration_is_deterministic() {
        let p = Graph::builder().node("x", None).node("y", None).edge("e", "x", "y", None).build().unwrap();
        let h = Graph::builder()
            .node("a", None)
            .node("b", None)
            .node("c", None)
            .edge("1", "a", "b", None)
            .edge("2", "b", "c", None)
            .edge("3", "c", "a", None)
            .build()
            .unwrap();
        assert_eq!(enumerate_morphisms(&p, &h, false), enumerate_morphisms(&p, &h, false));
    }
}
