//! Renders the derivation history of a run as DOT and its traces as JSON.

use gta::export::{history_dot, traces_json};
use gta::prelude::*;

const SOURCE: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/ferryman.gts"));

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gts = parse_gts(SOURCE)?;
    let mut store = GraphStore::new();
    let grape = Evaluator::new(&gts, &mut store).run_program("ferryman")?;
    store.save_grape("ferryman", grape);
    print!("{}", history_dot(&store, "ferryman")?);
    let traces = traces_json(&store, "ferryman")?;
    println!("{} trace entries", serde_json::from_str::<Vec<serde_json::Value>>(&traces)?.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
