//! Plugging a user-defined graph order into `select` and `dist`.

use std::cmp::Ordering;
use std::sync::Arc;

use gta::dsl::parse_gts_with;
use gta::prelude::*;

/// Orders graphs by how many nodes carry the label `Hot`.
struct HotNodes;

impl GraphOrder for HotNodes {
    fn name(&self) -> &str {
        "hot-nodes"
    }

    fn key_cmp(&self, a: &Graph, b: &Graph) -> Ordering {
        let hot = |g: &Graph| g.nodes().iter().filter(|n| n.label.as_deref() == Some("Hot")).count();
        hot(a).cmp(&hot(b))
    }
}

const SOURCE: &str = r#"
(rule seed (:l) (:r (node a Cold) (node b Cold) (node c Cold)))
(rule heat (:l (node x Cold)) (:r (node h Hot)))
(program warmest (-> (newgrape) seed (|| heat (-> heat heat)) (select 1 hot-nodes)))
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut orders = OrderRegistry::builtin();
    orders.register(Arc::new(HotNodes));
    let gts = parse_gts_with(SOURCE, &orders)?;
    let mut store = GraphStore::new();
    let grape = Evaluator::new(&gts, &mut store).with_orders(orders).run_program("warmest")?;
    let best = grape.last_ids();
    assert_eq!(best.len(), 1);
    let g = store.graph(best[0])?;
    let hot = g.nodes().iter().filter(|n| n.label.as_deref() == Some("Hot")).count();
    assert_eq!(hot, 2);
    println!("kept graph {} with {hot} hot nodes", best[0]);
    println!("{}", gta::export::graph_dot("warmest", g));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
