//! Rules, matches, the gluing condition and rule application.

use gta::prelude::*;
use gta::rewrite::satisfies_gluing;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // delete a node labeled Task
    let lhs = Graph::builder().node("t", Some("Task")).build()?;
    let drop_task = Rule::new("drop-task", lhs, Graph::empty(), false)?;

    let host = Graph::builder()
        .node("t1", Some("Task"))
        .node("t2", Some("Task"))
        .node("u", Some("User"))
        .edge("owns", "u", "t1", None)
        .build()?;

    for m in find_matches(&drop_task, &host) {
        println!("match {} satisfies gluing: {}", m.encode(), satisfies_gluing(&drop_task, &host, &m));
    }
    // only t2 can go: t1 still has an incident edge
    let applicable: Vec<_> = find_matches(&drop_task, &host)
        .into_iter()
        .filter(|m| satisfies_gluing(&drop_task, &host, m))
        .collect();
    assert_eq!(applicable.len(), 1);
    let out = apply(&drop_task, &host, &applicable[0])?;
    println!("after: {} nodes, {} edges", out.node_count(), out.edge_count());

    // create: interface node `u` is kept, `n` and `e` are fresh
    let lhs = Graph::builder().node("u", Some("User")).build()?;
    let rhs = Graph::builder().node("u", Some("User")).node("n", Some("Task")).edge("e", "u", "n", None).build()?;
    let assign = Rule::new("assign", lhs, rhs, true)?;
    let m = &find_matches(&assign, &out)[0];
    let again = apply(&assign, &out, m)?;
    assert_eq!(again, apply(&assign, &out, m)?, "application is a pure function");
    println!("{}", serde_json::to_string_pretty(&again)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
