//! Solves the ferryman puzzle with two equivalent programs.

use gta::prelude::*;

const SOURCE: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/ferryman.gts"));

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gts = parse_gts(SOURCE)?;
    let goal = gts.constraint(&ConstraintRef::positive("all_on_the_other_side!")).expect("declared");
    for program in ["ferryman", "ferryman-schema"] {
        let mut store = GraphStore::new();
        let grape = Evaluator::new(&gts, &mut store).run_program(program)?;
        let solutions: Vec<_> = grape.last_ids();
        println!("{program}: {} elements, {} graphs created, solution {:?}", grape.len(), store.len(), solutions);
        for id in solutions {
            assert!(satisfies(store.graph(id)?, goal));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
