//! Snapshots, audit and manual garbage collection.

use gta::prelude::*;

const SOURCE: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/ferryman.gts"));

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gts = parse_gts(SOURCE)?;
    let mut store = GraphStore::new();
    for program in ["ferryman", "ferryman-until"] {
        let grape = Evaluator::new(&gts, &mut store).run_program(program)?;
        store.save_grape(program, grape);
    }
    println!("{} graphs after two runs", store.len());

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("store.json");
    store.save(&path)?;
    let mut loaded = GraphStore::load(&path)?;
    assert!(loaded.audit().is_ok());

    let removed = loaded.gc(&["ferryman"])?;
    println!("gc kept `ferryman`: removed {removed}, {} remain", loaded.len());
    assert!(loaded.grape("ferryman-until").is_err());
    assert!(loaded.audit().is_ok());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
