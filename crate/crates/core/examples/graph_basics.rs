//! Graphs, morphisms, certificates and isomorphism.

use gta::prelude::*;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = Graph::builder()
        .node("a", Some("City"))
        .node("b", Some("City"))
        .node("c", Some("City"))
        .edge("ab", "a", "b", Some("road"))
        .edge("bc", "b", "c", Some("road"))
        .build()?;
    // same shape, different ids
    let renamed = Graph::builder()
        .node("x", Some("City"))
        .node("y", Some("City"))
        .node("z", Some("City"))
        .edge("e1", "y", "z", Some("road"))
        .edge("e2", "x", "y", Some("road"))
        .build()?;
    assert_eq!(path.certificate(), renamed.certificate());
    assert!(isomorphic(&path, &renamed));

    let step = Graph::builder().node("p", None).node("q", None).edge("r", "p", "q", Some("road")).build()?;
    let matches = enumerate_morphisms(&step, &path, true);
    println!("{} occurrences of a road in the path", matches.len());
    for m in &matches {
        println!("  {}", m.encode());
    }
    println!("certificate {}", path.certificate());
    println!("{}", serde_json::to_string(&path)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
