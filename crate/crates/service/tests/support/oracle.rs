//! Reference implementations the prover is compared against.

use std::collections::{BTreeMap, BTreeSet};

use prooftutor::formula::{Formula, Term};

/// Every formula over `atoms` with at most `max` connectives, where `!` is
/// unary and `&`, `|`, `->`, `<->` are binary.
pub fn propositional_formulas(atoms: &[&str], max: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![atoms.iter().map(|&a| Formula::prop(a)).collect()];
    for n in 1..=max {
        let mut level = Vec::new();
        for f in &by_size[n - 1] {
            level.push(Formula::not(f.clone()));
        }
        for left in 0..n {
            let right = n - 1 - left;
            for l in &by_size[left] {
                for r in &by_size[right] {
                    level.push(Formula::and(l.clone(), r.clone()));
                    level.push(Formula::or(l.clone(), r.clone()));
                    level.push(Formula::implies(l.clone(), r.clone()));
                    level.push(Formula::iff(l.clone(), r.clone()));
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().collect()
}

pub fn eval(f: &Formula, value: &dyn Fn(&str) -> bool) -> bool {
    match f {
        Formula::Atom(p, _) => value(p),
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not(a) => !eval(a, value),
        Formula::And(a, b) => eval(a, value) && eval(b, value),
        Formula::Or(a, b) => eval(a, value) || eval(b, value),
        Formula::Implies(a, b) => !eval(a, value) || eval(b, value),
        Formula::Iff(a, b) => eval(a, value) == eval(b, value),
        Formula::Forall(..) | Formula::Exists(..) => panic!("quantifier in a propositional formula"),
    }
}

/// Truth-table check over the atoms occurring in `f`.
pub fn is_tautology(f: &Formula) -> bool {
    let atoms: Vec<String> = f.predicates().into_iter().map(|(p, _)| p).collect();
    (0u32..1 << atoms.len()).all(|bits| {
        eval(f, &|p| {
            let i = atoms.iter().position(|a| a == p).expect("atom listed");
            bits & (1 << i) != 0
        })
    })
}

pub type GroundAtom = (String, Vec<String>);

/// A definite clause `body -> head` over variables and constants.
#[derive(Clone, Debug)]
pub struct Clause {
    pub vars: Vec<String>,
    pub body: Vec<(String, Vec<Term>)>,
    pub head: (String, Vec<Term>),
}

/// Knowledge base restricted to ground facts, ground disjunctions of atoms and
/// universally closed definite clauses.
#[derive(Clone, Debug, Default)]
pub struct HornKb {
    pub facts: BTreeSet<GroundAtom>,
    pub disjunctions: Vec<Vec<GroundAtom>>,
    pub clauses: Vec<Clause>,
}

impl HornKb {
    pub fn from_formulas<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Option<Self> {
        let mut kb = HornKb::default();
        for f in formulas {
            if let Some(a) = ground_atom(f) {
                kb.facts.insert(a);
            } else if let Formula::Or(..) = f {
                kb.disjunctions.push(disjuncts(f)?);
            } else {
                kb.clauses.push(clause(f)?);
            }
        }
        Some(kb)
    }

    /// Whether every model of the knowledge base satisfies `goal`: for each
    /// choice of one disjunct per disjunction, the goal is in the least
    /// Herbrand model of the resulting definite program.
    pub fn entails(&self, goal: &GroundAtom, constants: &BTreeSet<String>) -> bool {
        let mut choices = vec![self.facts.clone()];
        for d in &self.disjunctions {
            choices = choices.iter().flat_map(|c| d.iter().map(move |a| {
                let mut c = c.clone();
                c.insert(a.clone());
                c
            })).collect();
        }
        choices.into_iter().all(|facts| self.saturate(facts, constants).contains(goal))
    }

    /// Like [`HornKb::entails`] for goals built from atoms with `&`, `|` and
    /// `exists`. Such goals are monotone, so checking the least models is
    /// enough. `None` when the goal has any other shape.
    pub fn entails_positive(&self, goal: &Formula, constants: &BTreeSet<String>) -> Option<bool> {
        let mut choices = vec![self.facts.clone()];
        for d in &self.disjunctions {
            choices = choices.iter().flat_map(|c| d.iter().map(move |a| {
                let mut c = c.clone();
                c.insert(a.clone());
                c
            })).collect();
        }
        let mut verdict = true;
        for facts in choices {
            let model = self.saturate(facts, constants);
            verdict &= holds(goal, &model, constants, &BTreeMap::new())?;
        }
        Some(verdict)
    }

    fn saturate(&self, mut facts: BTreeSet<GroundAtom>, constants: &BTreeSet<String>) -> BTreeSet<GroundAtom> {
        loop {
            let mut new = Vec::new();
            for c in &self.clauses {
                for binding in assignments(&c.vars, constants) {
                    if c.body.iter().all(|a| facts.contains(&instantiate(a, &binding))) {
                        let head = instantiate(&c.head, &binding);
                        if !facts.contains(&head) {
                            new.push(head);
                        }
                    }
                }
            }
            if new.is_empty() {
                return facts;
            }
            facts.extend(new);
        }
    }
}

fn holds(f: &Formula, model: &BTreeSet<GroundAtom>, constants: &BTreeSet<String>, binding: &BTreeMap<String, String>) -> Option<bool> {
    Some(match f {
        Formula::Top => true,
        Formula::Atom(p, args) => model.contains(&instantiate(&(p.clone(), args.clone()), binding)),
        Formula::And(a, b) => holds(a, model, constants, binding)? & holds(b, model, constants, binding)?,
        Formula::Or(a, b) => holds(a, model, constants, binding)? | holds(b, model, constants, binding)?,
        Formula::Exists(v, body) => {
            let mut any = false;
            for c in constants {
                let mut b = binding.clone();
                b.insert(v.clone(), c.clone());
                any |= holds(body, model, constants, &b)?;
            }
            any
        }
        _ => return None,
    })
}

fn assignments(vars: &[String], constants: &BTreeSet<String>) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|b| constants.iter().map(move |c| {
                let mut b = b.clone();
                b.insert(v.clone(), c.clone());
                b
            }))
            .collect();
    }
    out
}

fn instantiate((p, args): &(String, Vec<Term>), binding: &BTreeMap<String, String>) -> GroundAtom {
    let args = args
        .iter()
        .map(|t| match t {
            Term::Var(v) => binding[v].clone(),
            Term::Const(c) => c.clone(),
            Term::App(..) => panic!("function terms are outside the ground fragment"),
        })
        .collect();
    (p.clone(), args)
}

pub fn ground_atom(f: &Formula) -> Option<GroundAtom> {
    match f {
        Formula::Atom(p, args) => Some((
            p.clone(),
            args.iter().map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                _ => None,
            }).collect::<Option<_>>()?,
        )),
        _ => None,
    }
}

fn disjuncts(f: &Formula) -> Option<Vec<GroundAtom>> {
    match f {
        Formula::Or(a, b) => {
            let mut out = disjuncts(a)?;
            out.extend(disjuncts(b)?);
            Some(out)
        }
        _ => Some(vec![ground_atom(f)?]),
    }
}

fn clause(f: &Formula) -> Option<Clause> {
    let mut vars = Vec::new();
    let mut f = f;
    while let Formula::Forall(v, body) = f {
        vars.push(v.clone());
        f = body;
    }
    let Formula::Implies(body, head) = f else { return None };
    Some(Clause { vars, body: conjuncts(body)?, head: atom(head)? })
}

fn conjuncts(f: &Formula) -> Option<Vec<(String, Vec<Term>)>> {
    match f {
        Formula::And(a, b) => {
            let mut out = conjuncts(a)?;
            out.extend(conjuncts(b)?);
            Some(out)
        }
        _ => Some(vec![atom(f)?]),
    }
}

fn atom(f: &Formula) -> Option<(String, Vec<Term>)> {
    match f {
        Formula::Atom(p, args) => Some((p.clone(), args.clone())),
        _ => None,
    }
}
