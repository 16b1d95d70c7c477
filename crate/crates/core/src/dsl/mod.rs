//! The `.gts` language: rules, constraints and programs in s-expression form.
//!
//! ```text
//! (rule ferry :iso (:l (node f Ferryman) ...) (:r ...))
//! (constraint safe! (:if ...) (:then ...))
//! (program solve (-> (newgrape) setup (->?+ goal! step)))
//! ```
//!
//! Loading runs three phases: the reader builds s-expressions, the parser
//! builds a surface tree and resolves every name, and [`desugar`] maps the
//! surface tree onto core [`ProgramExpr`] operators. The grammar is in
//! `docs/dsl.md`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::ProgramExpr;
use crate::constraint::{AtomicConstraint, Constraint, ConstraintRef};
use crate::graph::{Graph, OrderRegistry};
use crate::rewrite::Rule;

mod parse;
pub mod sexpr;

pub use parse::{desugar, Surface};

use sexpr::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: unresolved {kind} `{name}`")]
    UnresolvedName { kind: &'static str, name: String, line: usize, col: usize },
    #[error("{line}:{col}: `{form}` expects {expected}")]
    Arity { form: String, expected: &'static str, line: usize, col: usize },
    #[error("{line}:{col}: duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String, line: usize, col: usize },
    #[error("{line}:{col}: {message}")]
    Invalid { message: String, line: usize, col: usize },
}

impl DslError {
    pub(crate) fn syntax(at: Span, message: impl Into<String>) -> Self {
        DslError::Syntax { line: at.line, col: at.col, message: message.into() }
    }

    pub(crate) fn invalid(at: Span, message: impl Into<String>) -> Self {
        DslError::Invalid { message: message.into(), line: at.line, col: at.col }
    }

    /// True for errors raised while resolving names rather than reading text.
    pub fn is_resolution(&self) -> bool {
        matches!(self, DslError::UnresolvedName { .. })
    }
}

/// Source-level definition of a constraint. Compound constraints refer to
/// constraints declared before them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintDef {
    Atomic(AtomicConstraint),
    Not(ConstraintRef),
    Or(ConstraintRef, ConstraintRef),
}

/// Words that cannot be used as rule or constraint names.
pub const RESERVED: &[&str] = &["cut", "newgrape", "dist"];

/// A loaded graph transformation system: rules, constraints and programs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GtsDocument {
    rules: Vec<Rule>,
    rule_index: HashMap<String, usize>,
    constraint_defs: Vec<(String, ConstraintDef)>,
    // both polarities of every declared constraint
    resolved: HashMap<ConstraintRef, Constraint>,
    programs: Vec<(String, ProgramExpr)>,
    program_index: HashMap<String, usize>,
    orders: BTreeSet<String>,
}

fn check_name(kind: &'static str, name: &str) -> Result<(), String> {
    if name.is_empty() || name.ends_with('-') || name.starts_with(':') || RESERVED.contains(&name) {
        return Err(format!("`{name}` is not a valid {kind} name"));
    }
    if name.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ';' | '"')) {
        return Err(format!("`{name}` is not a valid {kind} name"));
    }
    Ok(())
}

impl GtsDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rule_index.get(name).map(|&i| &self.rules[i])
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Resolves `c` or `c-` to its constraint.
    pub fn constraint(&self, r: &ConstraintRef) -> Option<&Constraint> {
        self.resolved.get(r)
    }

    pub fn constraint_names(&self) -> impl Iterator<Item = &str> {
        self.constraint_defs.iter().map(|(n, _)| n.as_str())
    }

    pub fn constraint_def(&self, name: &str) -> Option<&ConstraintDef> {
        self.constraint_defs.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn program(&self, name: &str) -> Option<&ProgramExpr> {
        self.program_index.get(name).map(|&i| &self.programs[i].1)
    }

    pub fn program_names(&self) -> impl Iterator<Item = &str> {
        self.programs.iter().map(|(n, _)| n.as_str())
    }

    /// Names of the graph orders used by `select` and `dist` in programs.
    pub fn orders(&self) -> &BTreeSet<String> {
        &self.orders
    }

    fn has_constraint(&self, name: &str) -> bool {
        self.resolved.contains_key(&ConstraintRef::positive(name))
    }

    pub fn add_rule(&mut self, rule: Rule) -> Result<(), DslError> {
        self.add_rule_at(rule, Span::default())
    }

    pub(crate) fn add_rule_at(&mut self, rule: Rule, at: Span) -> Result<(), DslError> {
        let name = rule.name().to_owned();
        check_name("rule", &name).map_err(|m| DslError::invalid(at, m))?;
        if self.rule_index.contains_key(&name) || self.has_constraint(&name) {
            return Err(DslError::Duplicate { kind: "rule", name, line: at.line, col: at.col });
        }
        self.rule_index.insert(name, self.rules.len());
        self.rules.push(rule);
        Ok(())
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, def: ConstraintDef) -> Result<(), DslError> {
        self.add_constraint_at(name.into(), def, Span::default())
    }

    pub(crate) fn add_constraint_at(&mut self, name: String, def: ConstraintDef, at: Span) -> Result<(), DslError> {
        check_name("constraint", &name).map_err(|m| DslError::invalid(at, m))?;
        if self.has_constraint(&name) || self.rule_index.contains_key(&name) {
            return Err(DslError::Duplicate { kind: "constraint", name, line: at.line, col: at.col });
        }
        let lookup = |r: &ConstraintRef| {
            self.resolved.get(r).cloned().ok_or_else(|| DslError::UnresolvedName {
                kind: "constraint",
                name: r.to_string(),
                line: at.line,
                col: at.col,
            })
        };
        let k = match &def {
            ConstraintDef::Atomic(a) => Constraint::Atomic(a.clone()),
            ConstraintDef::Not(r) => Constraint::not(lookup(r)?),
            ConstraintDef::Or(a, b) => Constraint::or(lookup(a)?, lookup(b)?),
        };
        self.resolved.insert(ConstraintRef::negative(name.clone()), Constraint::not(k.clone()));
        self.resolved.insert(ConstraintRef::positive(name.clone()), k);
        self.constraint_defs.push((name, def));
        Ok(())
    }

    /// Adds a program after checking that every rule and constraint it
    /// mentions is declared. Order names are recorded, not checked.
    pub fn add_program(&mut self, name: impl Into<String>, body: ProgramExpr) -> Result<(), DslError> {
        self.add_program_at(name.into(), body, Span::default())
    }

    pub(crate) fn add_program_at(&mut self, name: String, body: ProgramExpr, at: Span) -> Result<(), DslError> {
        if self.program_index.contains_key(&name) {
            return Err(DslError::Duplicate { kind: "program", name, line: at.line, col: at.col });
        }
        self.check_refs(&body, at)?;
        self.program_index.insert(name.clone(), self.programs.len());
        self.programs.push((name, body));
        Ok(())
    }

    fn check_refs(&mut self, e: &ProgramExpr, at: Span) -> Result<(), DslError> {
        let unresolved = |kind, name: String| DslError::UnresolvedName { kind, name, line: at.line, col: at.col };
        match e {
            ProgramExpr::Constrain(c) | ProgramExpr::Unconstrain(c) => {
                if !self.resolved.contains_key(c) {
                    return Err(unresolved("constraint", c.to_string()));
                }
            }
            ProgramExpr::Derive(r) => {
                if !self.rule_index.contains_key(r) {
                    return Err(unresolved("rule", r.clone()));
                }
            }
            ProgramExpr::Select { order, .. } | ProgramExpr::Distinct(Some(order)) => {
                self.orders.insert(order.clone());
            }
            ProgramExpr::Seq(a, b) | ProgramExpr::Alt(a, b) => {
                self.check_refs(a, at)?;
                self.check_refs(b, at)?;
            }
            ProgramExpr::Loop(e) => self.check_refs(e, at)?,
            ProgramExpr::Search(c, e) => {
                if !self.resolved.contains_key(c) {
                    return Err(unresolved("constraint", c.to_string()));
                }
                self.check_refs(e, at)?;
            }
            ProgramExpr::Cut | ProgramExpr::Distinct(None) | ProgramExpr::Star => {}
        }
        Ok(())
    }

    /// Renders the document as `.gts` source. Programs are printed in core
    /// form, so sugar such as `->?+` comes back expanded; parsing the output
    /// yields an equal document.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let iso = if r.iso_match() { " :iso" } else { "" };
            let _ = writeln!(out, "(rule {}{iso}", atom(r.name()));
            let _ = writeln!(out, "  (:l{})", decls(r.lhs()));
            let _ = writeln!(out, "  (:r{}))", decls(r.rhs()));
        }
        for (name, def) in &self.constraint_defs {
            match def {
                ConstraintDef::Atomic(a) => {
                    let _ = writeln!(out, "(constraint {}", atom(name));
                    let _ = writeln!(out, "  (:if{})", decls(a.premise()));
                    let _ = writeln!(out, "  (:then{}))", decls(a.conclusion()));
                }
                ConstraintDef::Not(r) => {
                    let _ = writeln!(out, "(constraint {} (not {r}))", atom(name));
                }
                ConstraintDef::Or(a, b) => {
                    let _ = writeln!(out, "(constraint {} (or {a} {b}))", atom(name));
                }
            }
        }
        for (name, body) in &self.programs {
            let _ = writeln!(out, "(program {} {body})", atom(name));
        }
        out
    }
}

fn decls(g: &Graph) -> String {
    let mut s = String::new();
    for n in g.nodes() {
        let _ = write!(s, " (node {}", atom(&n.id.0));
        if let Some(l) = &n.label {
            let _ = write!(s, " {}", atom(l));
        }
        s.push(')');
    }
    for e in g.edges() {
        let _ = write!(s, " (edge {} {} {}", atom(&e.id.0), atom(&e.src.0), atom(&e.tgt.0));
        if let Some(l) = &e.label {
            let _ = write!(s, " {}", atom(l));
        }
        s.push(')');
    }
    s
}

/// Prints `s` bare when the reader would give it back unchanged, quoted
/// otherwise.
fn atom(s: &str) -> String {
    let bare = !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ';' | '"' | '\\'));
    if bare {
        s.to_owned()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n"))
    }
}

/// Parses and resolves a `.gts` source using the built-in graph orders.
pub fn parse_gts(src: &str) -> Result<GtsDocument, DslError> {
    parse_gts_with(src, &OrderRegistry::builtin())
}

/// Like [`parse_gts`]; `orders` decides which order names are accepted.
pub fn parse_gts_with(src: &str, orders: &OrderRegistry) -> Result<GtsDocument, DslError> {
    parse::load(&sexpr::read_all(src)?, orders)
}

