//! Surface forms, name resolution and desugaring.

use super::sexpr::{SExpr, Span};
use super::{ConstraintDef, DslError, GtsDocument};
use crate::algebra::ProgramExpr;
use crate::constraint::{AtomicConstraint, ConstraintRef};
use crate::graph::{Graph, OrderRegistry};
use crate::rewrite::Rule;

/// A resolved program in surface syntax. Every name has been checked; the
/// variadic forms keep their operand lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Surface {
    /// `r`
    Rule(String),
    /// `c` or `c-`
    Check(ConstraintRef),
    /// `(schema c ..)`
    Schema(Vec<ConstraintRef>),
    /// `(schema-drop c ..)`
    SchemaDrop(Vec<ConstraintRef>),
    /// `(-> e ..)`
    Seq(Vec<Surface>),
    /// `(|| e ..)`
    Alt(Vec<Surface>),
    /// `(->* e ..)`
    Loop(Vec<Surface>),
    /// `(->?* c e ..)`
    Until(ConstraintRef, Vec<Surface>),
    /// `(->?+ c e ..)`
    DistinctUntil(ConstraintRef, Vec<Surface>),
    Cut,
    NewGrape,
    Dist(Option<String>),
    Select(usize, String),
}

fn seq(items: &[Surface]) -> ProgramExpr {
    ProgramExpr::seq_all(items.iter().map(desugar)).expect("parser rejects empty operand lists")
}

fn seq_refs(refs: &[ConstraintRef], f: fn(ConstraintRef) -> ProgramExpr) -> ProgramExpr {
    ProgramExpr::seq_all(refs.iter().cloned().map(f)).expect("parser rejects empty operand lists")
}

/// Maps a surface program onto core operators.
pub fn desugar(s: &Surface) -> ProgramExpr {
    match s {
        Surface::Rule(r) => ProgramExpr::derive(r.clone()),
        Surface::Check(c) => ProgramExpr::check(c.clone()),
        Surface::Schema(cs) => seq_refs(cs, ProgramExpr::Constrain),
        Surface::SchemaDrop(cs) => seq_refs(cs, ProgramExpr::Unconstrain),
        Surface::Seq(es) => seq(es),
        Surface::Alt(es) => ProgramExpr::alt_all(es.iter().map(desugar)).expect("parser rejects empty operand lists"),
        Surface::Loop(es) => ProgramExpr::looped(seq(es)),
        Surface::Until(c, es) => ProgramExpr::search(c.clone(), seq(es)),
        Surface::DistinctUntil(c, es) => ProgramExpr::seq(
            ProgramExpr::Cut,
            ProgramExpr::search(c.clone(), ProgramExpr::seq(seq(es), ProgramExpr::Distinct(None))),
        ),
        Surface::Cut => ProgramExpr::Cut,
        Surface::NewGrape => ProgramExpr::Star,
        Surface::Dist(o) => ProgramExpr::Distinct(o.clone()),
        Surface::Select(k, v) => ProgramExpr::select(*k, v.clone()),
    }
}

fn arity(form: &str, expected: &'static str, at: Span) -> DslError {
    DslError::Arity { form: form.to_owned(), expected, line: at.line, col: at.col }
}

fn text<'s>(e: &'s SExpr, what: &str) -> Result<&'s str, DslError> {
    e.as_text().ok_or_else(|| DslError::syntax(e.span(), format!("expected {what}, found a list")))
}

fn symbol<'s>(e: &'s SExpr, what: &str) -> Result<&'s str, DslError> {
    e.as_atom().ok_or_else(|| DslError::syntax(e.span(), format!("expected {what}")))
}

pub(super) fn load(forms: &[SExpr], orders: &OrderRegistry) -> Result<GtsDocument, DslError> {
    let mut doc = GtsDocument::new();
    let mut programs = Vec::new();
    for form in forms {
        let items = form.as_list().ok_or_else(|| DslError::syntax(form.span(), "expected a top-level form"))?;
        let head = items.first().and_then(SExpr::as_atom);
        match head {
            Some("rule") => {
                let rule = parse_rule(items, form.span())?;
                doc.add_rule_at(rule, form.span())?;
            }
            Some("constraint") => {
                let (name, def) = parse_constraint(items, form.span())?;
                doc.add_constraint_at(name, def, form.span())?;
            }
            Some("program") => programs.push(form),
            _ => return Err(DslError::syntax(form.span(), "expected `rule`, `constraint` or `program`")),
        }
    }
    // Programs may mention rules and constraints declared after them.
    for form in programs {
        let items = form.as_list().expect("checked above");
        if items.len() < 3 {
            return Err(arity("program", "a name and at least one body expression", form.span()));
        }
        let name = symbol(&items[1], "a program name")?;
        let r = Resolver { doc: &doc, orders };
        let body = if items.len() == 3 { r.expr(&items[2])? } else { Surface::Seq(r.exprs(&items[2..])?) };
        doc.add_program_at(name.to_owned(), desugar(&body), form.span())?;
    }
    Ok(doc)
}

fn parse_decls(items: &[SExpr]) -> Result<Graph, DslError> {
    let mut b = Graph::builder();
    let mut spans = Vec::new();
    for d in items {
        let parts = d.as_list().ok_or_else(|| DslError::syntax(d.span(), "expected `(node ..)` or `(edge ..)`"))?;
        match parts.first().and_then(SExpr::as_atom) {
            Some("node") => {
                if !(2..=3).contains(&parts.len()) {
                    return Err(arity("node", "an id and an optional label", d.span()));
                }
                let label = parts.get(2).map(|l| text(l, "a label")).transpose()?;
                b = b.node(text(&parts[1], "a node id")?, label);
            }
            Some("edge") => {
                if !(4..=5).contains(&parts.len()) {
                    return Err(arity("edge", "an id, a source, a target and an optional label", d.span()));
                }
                let label = parts.get(4).map(|l| text(l, "a label")).transpose()?;
                b = b.edge(
                    text(&parts[1], "an edge id")?,
                    text(&parts[2], "a source node id")?,
                    text(&parts[3], "a target node id")?,
                    label,
                );
            }
            _ => return Err(DslError::syntax(d.span(), "expected `(node ..)` or `(edge ..)`")),
        }
        spans.push(d.span());
    }
    let at = spans.first().copied().unwrap_or_default();
    b.build().map_err(|e| DslError::invalid(at, e.to_string()))
}

/// Collects `(:key decls..)` sections; each key may appear at most once.
fn sections<'s>(items: &'s [SExpr], keys: &[&str], form: &str) -> Result<Vec<Option<&'s [SExpr]>>, DslError> {
    let mut found = vec![None; keys.len()];
    for s in items {
        let parts = s.as_list().ok_or_else(|| DslError::syntax(s.span(), format!("unexpected atom in `{form}`")))?;
        let key = parts.first().and_then(SExpr::as_atom).unwrap_or("");
        let Some(i) = keys.iter().position(|k| *k == key) else {
            return Err(DslError::syntax(s.span(), format!("expected one of {} in `{form}`", keys.join(", "))));
        };
        if found[i].is_some() {
            return Err(DslError::Duplicate { kind: "section", name: key.to_owned(), line: s.span().line, col: s.span().col });
        }
        found[i] = Some(&parts[1..]);
    }
    Ok(found)
}

fn parse_rule(items: &[SExpr], at: Span) -> Result<Rule, DslError> {
    if items.len() < 2 {
        return Err(arity("rule", "a name", at));
    }
    let name = symbol(&items[1], "a rule name")?;
    let mut rest = &items[2..];
    let iso = rest.first().and_then(SExpr::as_atom) == Some(":iso");
    if iso {
        rest = &rest[1..];
    }
    let found = sections(rest, &[":l", ":r"], "rule")?;
    let lhs = parse_decls(found[0].unwrap_or_default())?;
    let rhs = parse_decls(found[1].unwrap_or_default())?;
    Rule::new(name, lhs, rhs, iso).map_err(|e| DslError::invalid(at, e.to_string()))
}

fn parse_ref(e: &SExpr) -> Result<ConstraintRef, DslError> {
    let s = symbol(e, "a constraint name")?;
    Ok(match s.strip_suffix('-') {
        Some(base) if !base.is_empty() => ConstraintRef::negative(base),
        _ => ConstraintRef::positive(s),
    })
}

fn parse_constraint(items: &[SExpr], at: Span) -> Result<(String, ConstraintDef), DslError> {
    if items.len() < 2 {
        return Err(arity("constraint", "a name", at));
    }
    let name = symbol(&items[1], "a constraint name")?.to_owned();
    let rest = &items[2..];
    if let [SExpr::List(body, bat)] = rest {
        match body.first().and_then(SExpr::as_atom) {
            Some("not") => {
                let [_, r] = body.as_slice() else {
                    return Err(arity("not", "one constraint", *bat));
                };
                return Ok((name, ConstraintDef::Not(parse_ref(r)?)));
            }
            Some("or") => {
                let [_, a, b] = body.as_slice() else {
                    return Err(arity("or", "two constraints", *bat));
                };
                return Ok((name, ConstraintDef::Or(parse_ref(a)?, parse_ref(b)?)));
            }
            _ => {}
        }
    }
    let found = sections(rest, &[":if", ":then"], "constraint")?;
    let premise = parse_decls(found[0].unwrap_or_default())?;
    let conclusion = parse_decls(found[1].unwrap_or_default())?;
    let atomic = AtomicConstraint::new(name.clone(), premise, conclusion).map_err(|e| DslError::invalid(at, e.to_string()))?;
    Ok((name, ConstraintDef::Atomic(atomic)))
}

struct Resolver<'d> {
    doc: &'d GtsDocument,
    orders: &'d OrderRegistry,
}

impl Resolver<'_> {
    fn unresolved(kind: &'static str, name: &str, at: Span) -> DslError {
        DslError::UnresolvedName { kind, name: name.to_owned(), line: at.line, col: at.col }
    }

    fn constraint(&self, e: &SExpr) -> Result<ConstraintRef, DslError> {
        let r = parse_ref(e)?;
        if self.doc.constraint(&r).is_some() {
            return Ok(r);
        }
        Err(Self::unresolved("constraint", e.as_atom().unwrap_or_default(), e.span()))
    }

    fn order(&self, e: &SExpr) -> Result<String, DslError> {
        let o = symbol(e, "an order name")?;
        if self.orders.contains(o) {
            Ok(o.to_owned())
        } else {
            Err(Self::unresolved("order", o, e.span()))
        }
    }

    fn exprs(&self, items: &[SExpr]) -> Result<Vec<Surface>, DslError> {
        items.iter().map(|e| self.expr(e)).collect()
    }

    fn word(&self, w: &str, at: Span) -> Result<Surface, DslError> {
        match w {
            "cut" => return Ok(Surface::Cut),
            "newgrape" => return Ok(Surface::NewGrape),
            "dist" => return Ok(Surface::Dist(None)),
            _ => {}
        }
        if self.doc.rule(w).is_some() {
            return Ok(Surface::Rule(w.to_owned()));
        }
        let r = match w.strip_suffix('-') {
            Some(base) if !base.is_empty() => ConstraintRef::negative(base),
            _ => ConstraintRef::positive(w),
        };
        if self.doc.constraint(&r).is_some() {
            return Ok(Surface::Check(r));
        }
        Err(Self::unresolved("rule or constraint", w, at))
    }

    fn expr(&self, e: &SExpr) -> Result<Surface, DslError> {
        let at = e.span();
        let items = match e {
            SExpr::Atom(w, _) => return self.word(w, at),
            SExpr::Str(..) => return Err(DslError::syntax(at, "unexpected string in program")),
            SExpr::List(items, _) => items,
        };
        let Some(head) = items.first() else {
            return Err(DslError::syntax(at, "empty form"));
        };
        let Some(head) = head.as_atom() else {
            return Err(DslError::syntax(head.span(), "expected an operator"));
        };
        let args = &items[1..];
        let nonempty = |expected| if args.is_empty() { Err(arity(head, expected, at)) } else { Ok(()) };
        Ok(match head {
            "schema" | "schema-drop" => {
                nonempty("at least one constraint")?;
                let cs = args.iter().map(|a| self.constraint(a)).collect::<Result<_, _>>()?;
                if head == "schema" {
                    Surface::Schema(cs)
                } else {
                    Surface::SchemaDrop(cs)
                }
            }
            "->" => {
                nonempty("at least one expression")?;
                Surface::Seq(self.exprs(args)?)
            }
            "||" => {
                nonempty("at least one expression")?;
                Surface::Alt(self.exprs(args)?)
            }
            "->*" => {
                nonempty("at least one expression")?;
                Surface::Loop(self.exprs(args)?)
            }
            "->?*" | "->?+" => {
                if args.len() < 2 {
                    return Err(arity(head, "a constraint and at least one expression", at));
                }
                let c = self.constraint(&args[0])?;
                let body = self.exprs(&args[1..])?;
                if head == "->?*" {
                    Surface::Until(c, body)
                } else {
                    Surface::DistinctUntil(c, body)
                }
            }
            "cut" | "newgrape" => {
                if !args.is_empty() {
                    return Err(arity(head, "no arguments", at));
                }
                if head == "cut" {
                    Surface::Cut
                } else {
                    Surface::NewGrape
                }
            }
            "dist" => match args {
                [] => Surface::Dist(None),
                [o] => Surface::Dist(Some(self.order(o)?)),
                _ => return Err(arity(head, "at most one order", at)),
            },
            "select" => {
                let [k, v] = args else {
                    return Err(arity(head, "a count and an order", at));
                };
                let k = symbol(k, "a count")?
                    .parse::<usize>()
                    .map_err(|_| DslError::syntax(k.span(), "expected a non-negative integer"))?;
                Surface::Select(k, self.order(v)?)
            }
            other => return Err(Self::unresolved("operator", other, head_span(items))),
        })
    }
}

fn head_span(items: &[SExpr]) -> Span {
    items[0].span()
}
