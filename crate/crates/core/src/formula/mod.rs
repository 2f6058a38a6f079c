//! First-order terms and formulas.
//!
//! The concrete syntax is ASCII:
//!
//! ```text
//! P   Q(x, f(a))   a = b   true   false
//! !A   A & B   A | B   A -> B   A <-> B
//! forall x. A   exists x. A
//! ```
//!
//! Predicates start with an uppercase letter, terms with a lowercase one. A
//! lowercase identifier is a variable when an enclosing quantifier binds it and
//! a constant otherwise, so every parsed formula is closed.

mod parser;
mod printer;
mod subst;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use parser::{parse_formula, parse_term, ParseError};
pub use printer::{render_formula, render_term};
pub use subst::{alpha_eq, canonical_key, fresh_constant, match_instance, substitute};

/// Predicate name used for equality atoms (`s = t`).
pub const EQUALITY: &str = "=";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Top,
    Bottom,
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Forall(String, Arc<Formula>),
    Exists(String, Arc<Formula>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Number of symbols in the term.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Every identifier in the term, variables, constants and function symbols.
    pub(crate) fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(n) | Term::Const(n) => {
                out.insert(n.clone());
            }
            Term::App(f, args) => {
                out.insert(f.clone());
                args.iter().for_each(|a| a.collect_names(out));
            }
        }
    }

    fn collect_ground(&self, out: &mut BTreeSet<Term>) -> bool {
        let ground = match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => {
                let mut all = true;
                for a in args {
                    all &= a.collect_ground(out);
                }
                all
            }
        };
        if ground {
            out.insert(self.clone());
        }
        ground
    }
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(pred.into(), args)
    }

    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Atom(name.into(), Vec::new())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Arc::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Arc::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        free_vars(self)
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Constants occurring anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| collect_constants(t, &mut out));
        out
    }

    /// Function symbols with their arities.
    pub fn functions(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| collect_functions(t, &mut out));
        out
    }

    /// Predicate symbols with their arities.
    pub fn predicates(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |p, args| {
            out.insert((p.to_string(), args.len()));
        });
        out
    }

    /// Number of connectives and quantifiers.
    pub fn connective_count(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Top | Formula::Bottom => 0,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => {
                1 + a.connective_count()
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.connective_count() + b.connective_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Top | Formula::Bottom => 1,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::Top | Formula::Bottom => true,
            Formula::Forall(..) | Formula::Exists(..) => false,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
        }
    }

    pub fn visit_terms(&self, f: &mut impl FnMut(&Term)) {
        self.visit_atoms(&mut |_, args| args.iter().for_each(&mut *f));
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&str, &[Term])) {
        match self {
            Formula::Atom(p, args) => f(p, args),
            Formula::Top | Formula::Bottom => {}
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit_atoms(f),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

// Formulas and terms travel as their canonical text.

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&render_formula(self))
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&render_term(self))
    }
}

impl<'de> serde::Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_term(&text).map_err(serde::de::Error::custom)
    }
}

fn collect_constants(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(_) => {}
        Term::Const(c) => {
            out.insert(c.clone());
        }
        Term::App(_, args) => args.iter().for_each(|a| collect_constants(a, out)),
    }
}

fn collect_functions(t: &Term, out: &mut BTreeSet<(String, usize)>) {
    if let Term::App(f, args) = t {
        out.insert((f.clone(), args.len()));
        args.iter().for_each(|a| collect_functions(a, out));
    }
}

/// Variables occurring free in `f`.
pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    fn go(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Atom(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Top | Formula::Bottom => {}
            Formula::Not(a) => go(a, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                go(a, out);
                go(b, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let mut inner = BTreeSet::new();
                go(body, &mut inner);
                inner.remove(v);
                out.extend(inner);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut out);
    out
}

/// All variable-free subterms occurring in `fs`.
pub fn ground_subterms<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for f in fs {
        f.visit_terms(&mut |t| {
            t.collect_ground(&mut out);
        });
    }
    out
}

/// Checks that `name` is a well-formed identifier.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
