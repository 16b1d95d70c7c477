//! Pluggable total orders on graphs, used by select and distinct.
//!
//! An order supplies a user-visible key comparison; [`compare`] completes
//! it into a strict total order by breaking ties on the interned graph id,
//! or on canonical serialization for graphs that are not interned.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{Graph, GraphId};

pub trait GraphOrder: Send + Sync {
    fn name(&self) -> &str;

    /// Key comparison. May return `Equal` for distinct graphs.
    fn key_cmp(&self, a: &Graph, b: &Graph) -> Ordering;
}

impl fmt::Debug for dyn GraphOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphOrder({})", self.name())
    }
}

/// A graph together with its store id, when it has one.
#[derive(Clone, Copy, Debug)]
pub struct GraphRef<'a> {
    pub id: Option<GraphId>,
    pub graph: &'a Graph,
}

impl<'a> GraphRef<'a> {
    pub fn interned(id: GraphId, graph: &'a Graph) -> Self {
        GraphRef { id: Some(id), graph }
    }

    pub fn loose(graph: &'a Graph) -> Self {
        GraphRef { id: None, graph }
    }
}

/// Strict comparison: `order`'s key, then interned id (or canonical bytes).
/// Only the same concrete graph compares `Equal`.
pub fn compare(order: &dyn GraphOrder, a: GraphRef<'_>, b: GraphRef<'_>) -> Ordering {
    order.key_cmp(a.graph, b.graph).then_with(|| match (a.id, b.id) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => a.graph.canonical_bytes().cmp(&b.graph.canonical_bytes()),
    })
}

/// Node count, then edge count, then certificate bytes.
#[derive(Debug, Default, Clone, Copy)]
pub struct NodesAsc;

impl GraphOrder for NodesAsc {
    fn name(&self) -> &str {
        "nodes-asc"
    }

    fn key_cmp(&self, a: &Graph, b: &Graph) -> Ordering {
        a.node_count()
            .cmp(&b.node_count())
            .then(a.edge_count().cmp(&b.edge_count()))
            .then_with(|| a.certificate().bytes.cmp(&b.certificate().bytes))
    }
}

/// Edge count, then node count, then certificate bytes.
#[derive(Debug, Default, Clone, Copy)]
pub struct EdgesAsc;

impl GraphOrder for EdgesAsc {
    fn name(&self) -> &str {
        "edges-asc"
    }

    fn key_cmp(&self, a: &Graph, b: &Graph) -> Ordering {
        a.edge_count()
            .cmp(&b.edge_count())
            .then(a.node_count().cmp(&b.node_count()))
            .then_with(|| a.certificate().bytes.cmp(&b.certificate().bytes))
    }
}

/// Reverses another order's key. The id tie-break stays ascending.
pub struct Reversed {
    name: String,
    inner: Arc<dyn GraphOrder>,
}

impl Reversed {
    pub fn new(name: impl Into<String>, inner: Arc<dyn GraphOrder>) -> Self {
        Reversed { name: name.into(), inner }
    }
}

impl GraphOrder for Reversed {
    fn name(&self) -> &str {
        &self.name
    }

    fn key_cmp(&self, a: &Graph, b: &Graph) -> Ordering {
        self.inner.key_cmp(b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown graph order `{0}`")]
pub struct UnknownOrder(pub String);

/// Named orders available to programs.
#[derive(Clone)]
pub struct OrderRegistry {
    orders: BTreeMap<String, Arc<dyn GraphOrder>>,
}

impl Default for OrderRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl fmt::Debug for OrderRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.orders.keys()).finish()
    }
}

impl OrderRegistry {
    pub const DEFAULT: &'static str = "nodes-asc";

    /// `nodes-asc`, `edges-asc` and their reversals `nodes-desc`, `edges-desc`.
    pub fn builtin() -> Self {
        let mut r = OrderRegistry { orders: BTreeMap::new() };
        let nodes: Arc<dyn GraphOrder> = Arc::new(NodesAsc);
        let edges: Arc<dyn GraphOrder> = Arc::new(EdgesAsc);
        r.register(Arc::new(Reversed::new("nodes-desc", nodes.clone())));
        r.register(Arc::new(Reversed::new("edges-desc", edges.clone())));
        r.register(nodes);
        r.register(edges);
        r
    }

    /// Registers (or replaces) an order under its own name.
    pub fn register(&mut self, order: Arc<dyn GraphOrder>) {
        self.orders.insert(order.name().to_owned(), order);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn GraphOrder>, UnknownOrder> {
        self.orders.get(name).cloned().ok_or_else(|| UnknownOrder(name.to_owned()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.orders.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.orders.keys().map(String::as_str)
    }
}
