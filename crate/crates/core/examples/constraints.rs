//! Atomic constraints and their combinators.

use gta::constraint::AtomicConstraint;
use gta::prelude::*;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // every Task has an owner
    let premise = Graph::builder().node("t", Some("Task")).build()?;
    let conclusion =
        Graph::builder().node("t", Some("Task")).node("u", Some("User")).edge("o", "u", "t", Some("owns")).build()?;
    let owned = Constraint::Atomic(AtomicConstraint::new("owned!", premise, conclusion)?);

    // there is at least one User
    let someone = Constraint::Atomic(AtomicConstraint::exists("someone!", Graph::builder().node("u", Some("User")).build()?));

    let g = Graph::builder()
        .node("u", Some("User"))
        .node("t1", Some("Task"))
        .node("t2", Some("Task"))
        .edge("o1", "u", "t1", Some("owns"))
        .build()?;
    println!("owned: {}", satisfies(&g, &owned));
    println!("someone: {}", satisfies(&g, &someone));
    println!("not owned or someone: {}", satisfies(&g, &Constraint::or(Constraint::not(owned.clone()), someone)));
    assert!(!satisfies(&g, &owned));
    assert!(satisfies(&Graph::empty(), &owned), "vacuously true without tasks");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
