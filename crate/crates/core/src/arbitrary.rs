//! Proptest strategies for formulas and proof situations.

use proptest::prelude::*;

use crate::document::KnowledgeBase;
use crate::formula::{Formula, Term};
use crate::kernel::ProofSituation;

const NAMES: [&str; 6] = ["x", "y", "z", "a", "b", "c"];
const VARIABLES: [&str; 3] = ["x", "y", "z"];

fn raw_term() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(&NAMES[..]).prop_map(Term::constant);
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(s, t)| Term::app("g", vec![s, t])),
        ]
    })
}

fn raw_atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        2 => prop::sample::select(&["S", "T"][..]).prop_map(Formula::prop),
        3 => raw_term().prop_map(|t| Formula::atom("P", vec![t])),
        2 => (raw_term(), raw_term()).prop_map(|(s, t)| Formula::atom("R", vec![s, t])),
        1 => (raw_term(), raw_term()).prop_map(|(s, t)| Formula::atom("=", vec![s, t])),
        1 => Just(Formula::Top),
        1 => Just(Formula::Bottom),
    ]
}

/// First-order formulas of depth at most `depth`, over unary `P`, binary `R`,
/// equality, nullary `S` and `T`, functions `f`/1 and `g`/2.
///
/// A name is a variable exactly where a quantifier binds it, which is how the
/// parser reads it back.
pub fn formula(depth: u32) -> BoxedStrategy<Formula> {
    let levels = depth.saturating_sub(1);
    raw_atom()
        .prop_recursive(levels, 64, 2, |inner| {
            let var = prop::sample::select(&VARIABLES[..]);
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
                (var.clone(), inner.clone()).prop_map(|(v, a)| Formula::forall(v, a)),
                (var, inner).prop_map(|(v, a)| Formula::exists(v, a)),
            ]
        })
        .prop_map(|f| bind(&f, &mut Vec::new()))
        .boxed()
}

/// Quantifier-free formulas over the given nullary atoms.
pub fn propositional(atoms: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        8 => prop::sample::select(atoms).prop_map(Formula::prop),
        1 => Just(Formula::Top),
        1 => Just(Formula::Bottom),
    ];
    leaf.prop_recursive(depth.saturating_sub(1), 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
    .boxed()
}

/// A situation with a goal and up to `max_assumptions` knowledge-base entries.
pub fn situation(
    goal: BoxedStrategy<Formula>,
    max_assumptions: usize,
) -> impl Strategy<Value = ProofSituation> {
    (
        goal.clone(),
        prop::collection::vec(goal, 0..=max_assumptions),
    )
        .prop_map(|(goal, kb)| {
            let labels: Vec<String> = (1..=kb.len()).map(|i| format!("H.{i}")).collect();
            let kb = KnowledgeBase::from_formulas(labels.iter().map(String::as_str).zip(kb));
            ProofSituation::initial(goal, &kb)
        })
}

fn bind(f: &Formula, bound: &mut Vec<String>) -> Formula {
    match f {
        Formula::Atom(p, args) => Formula::atom(
            p.clone(),
            args.iter().map(|t| bind_term(t, bound)).collect(),
        ),
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Not(a) => Formula::not(bind(a, bound)),
        Formula::And(a, b) => Formula::and(bind(a, bound), bind(b, bound)),
        Formula::Or(a, b) => Formula::or(bind(a, bound), bind(b, bound)),
        Formula::Implies(a, b) => Formula::implies(bind(a, bound), bind(b, bound)),
        Formula::Iff(a, b) => Formula::iff(bind(a, bound), bind(b, bound)),
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            bound.push(v.clone());
            let body = bind(a, bound);
            bound.pop();
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(v.clone(), body)
            } else {
                Formula::exists(v.clone(), body)
            }
        }
    }
}

fn bind_term(t: &Term, bound: &[String]) -> Term {
    match t {
        Term::Var(n) | Term::Const(n) if bound.contains(n) => Term::var(n.clone()),
        Term::Var(n) | Term::Const(n) => Term::constant(n.clone()),
        Term::App(name, args) => Term::app(
            name.clone(),
            args.iter().map(|a| bind_term(a, bound)).collect(),
        ),
    }
}
