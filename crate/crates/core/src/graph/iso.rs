use std::ops::ControlFlow;

use super::certificate::node_colors;
use super::morphism::{for_each_morphism, LabelMode, MatchOptions, Morphism};
use super::Graph;

/// True iff a label-exact bijective morphism exists. Certificates are
/// compared first; the exact search only runs when they agree.
pub fn isomorphic(g1: &Graph, g2: &Graph) -> bool {
    find_isomorphism(g1, g2).is_some()
}

/// An isomorphism `g1 -> g2`, if one exists.
pub fn find_isomorphism(g1: &Graph, g2: &Graph) -> Option<Morphism> {
    if g1.node_count() != g2.node_count() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    if g1.certificate() != g2.certificate() {
        return None;
    }
    // equal sizes + injective on nodes and edges = bijective
    let c1 = node_colors(g1);
    let c2 = node_colors(g2);
    let filter = |p: usize, h: usize| c1[p] == c2[h];
    let opts = MatchOptions { injective: true, labels: LabelMode::Exact, seed: None, node_filter: Some(&filter) };
    let mut found = None;
    for_each_morphism(g1, g2, &opts, |m| {
        found = Some(m.clone());
        ControlFlow::Break(())
    });
    found
}
