//! Functional graph transformation driven by a small control algebra.
//!
//! Graphs are immutable values. Rules never modify their host; every rule
//! application yields a new graph which is interned in a [`store::GraphStore`].
//! Programs are expressions over *grapes*, non-empty sequences of sets of
//! constrained graphs, and every operator is a deterministic function from
//! grape to grape. Non-determinism in rule matching is resolved by computing
//! all derivations breadth-first rather than by backtracking.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: labeled graphs, morphism enumeration, certificates,
//!   isomorphism and pluggable total orders.
//! - [`rewrite`]: rules, the gluing condition and rule application.
//! - [`constraint`]: atomic and compound graph constraints.
//! - [`algebra`]: grapes, program expressions and the evaluator.
//! - [`dsl`]: the textual `.gts` language for rules, constraints and programs.
//! - [`store`]: the interning graph store, step log, snapshots and GC.
//! - [`export`]: DOT and JSON renderings of grape histories and traces.
//! - [`cli`]: the driver used by the `gta` binary.
//!
//! ```
//! use gta::prelude::*;
//!
//! let src = r#"
//!   (rule add-x (:l) (:r (node x X)))
//!   (program p (-> (newgrape) add-x))
//! "#;
//! let gts = gta::dsl::parse_gts(src).unwrap();
//! let mut store = GraphStore::new();
//! let mut ev = Evaluator::new(&gts, &mut store);
//! let out = ev.run_program("p").unwrap();
//! assert_eq!(out.len(), 2);
//! assert_eq!(out.last().len(), 1);
//! ```
#![forbid(unsafe_code)]

pub mod algebra;
pub mod cli;
pub mod constraint;
pub mod dsl;
pub mod export;
pub mod graph;
pub mod rewrite;
pub mod store;

pub mod prelude {
    pub use crate::algebra::{ConstrainedGraph, EvalConfig, EvalError, Evaluator, Grape, ProgramExpr};
    pub use crate::constraint::{satisfies, Constraint, ConstraintRef};
    pub use crate::dsl::{parse_gts, GtsDocument};
    pub use crate::graph::{
        certificate, enumerate_morphisms, isomorphic, Certificate, Edge, EdgeId, Graph, GraphBuilder,
        GraphId, GraphOrder, Morphism, Node, NodeId, OrderRegistry,
    };
    pub use crate::rewrite::{apply, find_matches, DerivationStep, Rule};
    pub use crate::store::GraphStore;
}
