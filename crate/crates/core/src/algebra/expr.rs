use std::fmt;

use crate::constraint::ConstraintRef;

/// A program of the control algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProgramExpr {
    Constrain(ConstraintRef),
    Unconstrain(ConstraintRef),
    Derive(String),
    /// Keep at most `k` graphs, the maximal ones under `order`.
    Select { k: usize, order: String },
    Seq(Box<ProgramExpr>, Box<ProgramExpr>),
    Alt(Box<ProgramExpr>, Box<ProgramExpr>),
    Loop(Box<ProgramExpr>),
    Search(ConstraintRef, Box<ProgramExpr>),
    Cut,
    /// `None` uses the evaluator's default order.
    Distinct(Option<String>),
    Star,
}

impl ProgramExpr {
    pub fn derive(rule: impl Into<String>) -> Self {
        ProgramExpr::Derive(rule.into())
    }

    pub fn seq(a: ProgramExpr, b: ProgramExpr) -> Self {
        ProgramExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn alt(a: ProgramExpr, b: ProgramExpr) -> Self {
        ProgramExpr::Alt(Box::new(a), Box::new(b))
    }

    pub fn looped(e: ProgramExpr) -> Self {
        ProgramExpr::Loop(Box::new(e))
    }

    pub fn search(c: ConstraintRef, e: ProgramExpr) -> Self {
        ProgramExpr::Search(c, Box::new(e))
    }

    pub fn select(k: usize, order: impl Into<String>) -> Self {
        ProgramExpr::Select { k, order: order.into() }
    }

    /// Right fold with [`ProgramExpr::seq`]; `None` for an empty list.
    pub fn seq_all(items: impl IntoIterator<Item = ProgramExpr>) -> Option<Self> {
        fold_right(items.into_iter().collect(), Self::seq)
    }

    /// Right fold with [`ProgramExpr::alt`]. A single branch `e` becomes
    /// `Alt(e, e)`, which appends the last element of `e`'s result.
    pub fn alt_all(items: impl IntoIterator<Item = ProgramExpr>) -> Option<Self> {
        let items: Vec<_> = items.into_iter().collect();
        if items.len() == 1 {
            let e = items.into_iter().next().expect("one item");
            return Some(Self::alt(e.clone(), e));
        }
        fold_right(items, Self::alt)
    }

    /// Constraint check: `Seq(Constrain(c), Unconstrain(c))`.
    pub fn check(c: ConstraintRef) -> Self {
        Self::seq(ProgramExpr::Constrain(c.clone()), ProgramExpr::Unconstrain(c))
    }

    /// Flattens nested `Seq` nodes into their left-to-right operand list.
    pub fn flatten_seq(&self) -> Vec<&ProgramExpr> {
        match self {
            ProgramExpr::Seq(a, b) => {
                let mut v = a.flatten_seq();
                v.extend(b.flatten_seq());
                v
            }
            other => vec![other],
        }
    }
}

fn fold_right(mut items: Vec<ProgramExpr>, f: fn(ProgramExpr, ProgramExpr) -> ProgramExpr) -> Option<ProgramExpr> {
    let mut acc = items.pop()?;
    while let Some(prev) = items.pop() {
        acc = f(prev, acc);
    }
    Some(acc)
}

/// Prints the expression in core surface syntax; parsing the output gives
/// back the same expression.
impl fmt::Display for ProgramExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramExpr::Constrain(c) => write!(f, "(schema {c})"),
            ProgramExpr::Unconstrain(c) => write!(f, "(schema-drop {c})"),
            ProgramExpr::Derive(r) => f.write_str(r),
            ProgramExpr::Select { k, order } => write!(f, "(select {k} {order})"),
            ProgramExpr::Seq(a, b) => write!(f, "(-> {a} {b})"),
            ProgramExpr::Alt(a, b) => write!(f, "(|| {a} {b})"),
            ProgramExpr::Loop(e) => write!(f, "(->* {e})"),
            ProgramExpr::Search(c, e) => write!(f, "(->?* {c} {e})"),
            ProgramExpr::Cut => f.write_str("(cut)"),
            ProgramExpr::Distinct(None) => f.write_str("(dist)"),
            ProgramExpr::Distinct(Some(o)) => write!(f, "(dist {o})"),
            ProgramExpr::Star => f.write_str("(newgrape)"),
        }
    }
}
