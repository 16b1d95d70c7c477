//! Grapes, program expressions and their evaluation.
//!
//! A grape is a non-empty sequence of sets of constrained graphs. Each
//! operator maps a grape to a grape:
//!
//! | operator        | effect on `⟨.., Gn⟩`                                            |
//! |-----------------|-----------------------------------------------------------------|
//! | `Constrain(c)`  | keeps graphs of `Gn` satisfying `c`, adds `c` to their set      |
//! | `Unconstrain(c)`| removes `c` from the sets in `Gn`                               |
//! | `Derive(r)`     | appends all constraint-preserving derivations of `Gn` by `r`   |
//! | `Select(k, ≲)`  | keeps the `k` maximal graphs of `Gn`                            |
//! | `Seq(a, b)`     | `b` after `a`                                                   |
//! | `Alt(a, b)`     | appends the union of the last elements of `a` and `b`          |
//! | `Loop(e)`       | repeats `e` until it would produce an empty last element        |
//! | `Search(c, e)`  | repeats `e` until `Gn` is empty or has a graph satisfying `c`   |
//! | `Cut`           | keeps only `Gn`                                                 |
//! | `Distinct(≲)`   | drops graphs of `Gn` isomorphic to earlier or smaller ones      |
//! | `Star`          | the grape holding just the empty graph                         |

mod eval;
mod expr;
mod grape;

pub use eval::{cut, EvalConfig, EvalError, Evaluator};
pub use expr::ProgramExpr;
pub use grape::{ConstrainedGraph, Element, EmptyGrape, Grape};
