mod common;

use std::collections::BTreeSet;

use common::*;
use gta::graph::NodesAsc;
use gta::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ferryman_store() -> (GraphStore, Grape) {
    let gts = ferryman();
    let mut store = GraphStore::new();
    let grape = Evaluator::new(&gts, &mut store).run_program("ferryman").unwrap();
    store.save_grape("ferryman", grape.clone());
    (store, grape)
}

fn replay(gts: &GtsDocument, store: &GraphStore, s: &DerivationStep) -> Option<Result<Graph, String>> {
    let rule = gts.rule(&s.rule_name)?;
    let host = store.graph(s.input).ok()?;
    Some(apply(rule, host, &s.matching).map_err(|e| e.to_string()))
}

#[test]
fn interning_is_idempotent() {
    let mut store = GraphStore::new();
    let a = store.intern(graph(&[("a", None)], &[]));
    let again = store.intern(graph(&[("a", None)], &[]));
    let iso = store.intern(graph(&[("b", None)], &[]));
    assert_eq!(a, again);
    assert_ne!(a, iso);
    assert_eq!(store.len(), 2);
    assert_eq!(store.with_certificate(store.graph(a).unwrap().certificate()).count(), 2);
}

#[test]
fn ids_are_sequential() {
    let mut store = GraphStore::new();
    let ids: Vec<GraphId> = (0..5).map(|i| store.intern(graph(&[(&format!("n{i}"), None)], &[]))).collect();
    assert!(ids.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn find_isomorphic_respects_scope_and_order() {
    let mut store = GraphStore::new();
    let a = store.intern(graph(&[("a", None)], &[]));
    let b = store.intern(graph(&[("b", None)], &[]));
    let c = store.intern(graph(&[("c", Some("X"))], &[]));
    let probe = graph(&[("z", None)], &[]);
    let all: BTreeSet<GraphId> = [a, b, c].into();
    assert_eq!(store.find_isomorphic(&probe, &all, &NodesAsc), Some(a));
    assert_eq!(store.find_isomorphic(&probe, &[b, c].into(), &NodesAsc), Some(b));
    assert_eq!(store.find_isomorphic(&probe, &[c].into(), &NodesAsc), None);
    assert_eq!(store.find_isomorphic(&graph(&[("q", Some("Y"))], &[]), &all, &NodesAsc), None);
}

#[test]
fn gc_keeps_exactly_the_step_closure() {
    let (mut store, grape) = ferryman_store();
    let gts = ferryman();
    let mut side = Evaluator::new(&gts, &mut store);
    let scratch = side.run_program("ferryman-until").unwrap();
    store.save_grape("scratch", scratch);
    let extra = store.intern(graph(&[("lonely", None)], &[]));

    // oracle: backwards reachability over the step log
    let mut expected: BTreeSet<GraphId> = grape.graph_ids().collect();
    loop {
        let before = expected.len();
        for s in store.steps() {
            if expected.contains(&s.output) {
                expected.insert(s.input);
            }
        }
        if expected.len() == before {
            break;
        }
    }
    let before = store.len();
    let removed = store.gc(&["ferryman"]).unwrap();
    assert_eq!(removed, before - expected.len());
    assert_eq!(store.ids().collect::<BTreeSet<_>>(), expected);
    assert!(!store.contains(extra));
    assert!(store.grape("scratch").is_err());
    assert_eq!(store.grape("ferryman").unwrap(), &grape);
    assert!(store.audit().is_ok());
    assert!(store.audit_with(|s| replay(&gts, &store, s)).is_ok());
}

#[test]
fn gc_over_all_grapes_is_idempotent() {
    let (mut store, _) = ferryman_store();
    let roots: Vec<String> = store.grape_names().map(str::to_owned).collect();
    store.gc(&roots).unwrap();
    let len = store.len();
    assert_eq!(store.gc(&roots).unwrap(), 0);
    assert_eq!(store.len(), len);
}

#[test]
fn gc_with_unknown_root_fails_without_change() {
    let (mut store, _) = ferryman_store();
    let len = store.len();
    assert!(store.gc(&["nope"]).is_err());
    assert_eq!(store.len(), len);
}

#[test]
fn gc_with_no_roots_empties_the_store() {
    let (mut store, _) = ferryman_store();
    let len = store.len();
    assert_eq!(store.gc::<&str>(&[]).unwrap(), len);
    assert!(store.is_empty());
    assert!(store.steps().is_empty());
}

#[test]
fn history_and_traces() {
    let (store, grape) = ferryman_store();
    assert_eq!(store.history("ferryman").unwrap(), grape.history());
    let traces = store.traces("ferryman").unwrap();
    let ids: BTreeSet<GraphId> = grape.graph_ids().collect();
    assert!(!traces.is_empty());
    assert!(traces.iter().all(|s| ids.contains(&s.output)));
    let gts = ferryman();
    for s in traces {
        let out = replay(&gts, &store, s).unwrap().unwrap();
        assert_eq!(out.canonical_bytes(), store.graph(s.output).unwrap().canonical_bytes());
    }
    assert!(store.history("missing").is_err());
}

#[test]
fn duplicate_steps_are_logged_once() {
    let (mut store, _) = ferryman_store();
    let n = store.steps().len();
    let first = store.steps()[0].clone();
    store.record_step(first);
    assert_eq!(store.steps().len(), n);
}

#[test]
fn snapshot_round_trip_is_byte_stable() {
    let (store, _) = ferryman_store();
    let bytes = store.to_snapshot_bytes();
    let loaded = GraphStore::from_snapshot_bytes(&bytes).unwrap();
    assert_eq!(loaded.to_snapshot_bytes(), bytes);
    assert_eq!(loaded.len(), store.len());
    assert_eq!(loaded.steps(), store.steps());
    assert!(loaded.audit().is_ok());
}

#[test]
fn snapshot_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.json");
    assert!(GraphStore::open(&path).unwrap().is_empty());
    let (store, _) = ferryman_store();
    store.save(&path).unwrap();
    let loaded = GraphStore::load(&path).unwrap();
    assert_eq!(loaded.to_snapshot_bytes(), store.to_snapshot_bytes());
    std::fs::write(&path, b"{ not json").unwrap();
    assert!(GraphStore::load(&path).is_err());
}

#[test]
fn tampered_snapshot_fails_audit() {
    let (store, _) = ferryman_store();
    let mut v: serde_json::Value = serde_json::from_slice(&store.to_snapshot_bytes()).unwrap();
    let text = v.to_string();
    // point the first step at a graph that does not exist
    let steps = v.get_mut("steps").and_then(|s| s.as_array_mut()).expect("steps array");
    steps[0]["output"] = serde_json::json!(999_999);
    assert_ne!(v.to_string(), text);
    let loaded = GraphStore::from_snapshot_bytes(v.to_string().as_bytes()).unwrap();
    let report = loaded.audit();
    assert!(report.violations.iter().any(|v| v.contains("unknown graph")), "{report:?}");
}

#[test]
fn random_interning_keeps_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut store = GraphStore::new();
    for _ in 0..500 {
        let g = random_graph(&mut rng, 4, 4, LABELS);
        let id = store.intern(g.clone());
        let p = permuted(&mut rng, &g);
        // interning is by content, so only a literal copy maps to the same id
        assert_eq!(store.intern(p.clone()) == id, p.canonical_bytes() == g.canonical_bytes());
    }
    assert!(store.audit().is_ok());
}
