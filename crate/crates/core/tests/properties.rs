use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use proptest::prelude::*;

use prooftutor::arbitrary::{formula, propositional, situation};
use prooftutor::document::KnowledgeBase;
use prooftutor::formula::{
    alpha_eq, canonical_key, parse_formula, render_formula, substitute, Formula, Term,
};
use prooftutor::kernel::{applicable_applications, check_step, ProofSituation, StepVerdict};
use prooftutor::present::render_proof_nl;
use prooftutor::search::{
    preorder, propagate_status, prove, simplify, CancelToken, ProverConfig, SimplifyOptions,
};

/// A three-element structure whose interpretation is drawn from `seed`.
struct Model {
    seed: u64,
}

impl Model {
    const SIZE: u64 = 3;

    fn pick(&self, parts: &(impl Hash + ?Sized)) -> u64 {
        let mut h = DefaultHasher::new();
        self.seed.hash(&mut h);
        parts.hash(&mut h);
        h.finish()
    }

    fn term(&self, t: &Term, env: &BTreeMap<String, u64>) -> u64 {
        match t {
            Term::Var(v) => env[v],
            Term::Const(c) => self.pick(c.as_str()) % Self::SIZE,
            Term::App(f, args) => {
                let values: Vec<u64> = args.iter().map(|a| self.term(a, env)).collect();
                self.pick(&(f, values)) % Self::SIZE
            }
        }
    }

    fn holds(&self, f: &Formula, env: &mut BTreeMap<String, u64>) -> bool {
        match f {
            Formula::Top => true,
            Formula::Bottom => false,
            Formula::Atom(p, args) => {
                let values: Vec<u64> = args.iter().map(|a| self.term(a, env)).collect();
                if p == "=" {
                    values[0] == values[1]
                } else {
                    self.pick(&(p, values)) % 2 == 0
                }
            }
            Formula::Not(a) => !self.holds(a, env),
            Formula::And(a, b) => self.holds(a, env) && self.holds(b, env),
            Formula::Or(a, b) => self.holds(a, env) || self.holds(b, env),
            Formula::Implies(a, b) => !self.holds(a, env) || self.holds(b, env),
            Formula::Iff(a, b) => self.holds(a, env) == self.holds(b, env),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let saved = env.get(v).copied();
                let mut results = (0..Self::SIZE).map(|d| {
                    env.insert(v.clone(), d);
                    self.holds(a, env)
                });
                let out = if matches!(f, Formula::Forall(..)) {
                    results.all(|r| r)
                } else {
                    results.any(|r| r)
                };
                match saved {
                    Some(d) => env.insert(v.clone(), d),
                    None => env.remove(v),
                };
                out
            }
        }
    }
}

fn open_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(&["x", "y", "z"][..]).prop_map(Term::var),
        prop::sample::select(&["a", "b"][..]).prop_map(Term::constant),
    ];
    leaf.prop_recursive(2, 4, 2, |inner| inner.prop_map(|t| Term::app("f", vec![t])))
}

/// Renames every bound variable to a name of its own.
fn rename_bound(f: &Formula, prefix: &str, counter: &mut usize) -> Formula {
    match f {
        Formula::Atom(..) | Formula::Top | Formula::Bottom => f.clone(),
        Formula::Not(a) => Formula::not(rename_bound(a, prefix, counter)),
        Formula::And(a, b) => Formula::and(
            rename_bound(a, prefix, counter),
            rename_bound(b, prefix, counter),
        ),
        Formula::Or(a, b) => Formula::or(
            rename_bound(a, prefix, counter),
            rename_bound(b, prefix, counter),
        ),
        Formula::Implies(a, b) => Formula::implies(
            rename_bound(a, prefix, counter),
            rename_bound(b, prefix, counter),
        ),
        Formula::Iff(a, b) => Formula::iff(
            rename_bound(a, prefix, counter),
            rename_bound(b, prefix, counter),
        ),
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            *counter += 1;
            let fresh = format!("{prefix}{counter}");
            let body = rename_bound(
                &substitute(a, v, &Term::var(fresh.clone())),
                prefix,
                counter,
            );
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(fresh, body)
            } else {
                Formula::exists(fresh, body)
            }
        }
    }
}

fn countermodel_survives(s: &ProofSituation) -> Result<(), TestCaseError> {
    let atoms = ["P", "Q", "R"];
    for app in applicable_applications(s, &ProverConfig::all_active()) {
        prop_assert_eq!(check_step(s, &app), StepVerdict::Valid, "{:?}", app.rule);
        for bits in 0..8u32 {
            let model = |name: &str| {
                atoms
                    .iter()
                    .position(|a| *a == name)
                    .is_some_and(|i| bits >> i & 1 == 1)
            };
            let eval = |f: &Formula| truth(f, &model);
            let refutes = |sit: &ProofSituation| sit.formulas().all(eval) && !eval(&sit.goal);
            if refutes(s) {
                prop_assert!(
                    app.children.iter().any(refutes),
                    "{:?} loses the countermodel {bits:03b}",
                    app.rule
                );
            }
        }
    }
    Ok(())
}

fn truth(f: &Formula, model: &dyn Fn(&str) -> bool) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Atom(p, _) => model(p),
        Formula::Not(a) => !truth(a, model),
        Formula::And(a, b) => truth(a, model) && truth(b, model),
        Formula::Or(a, b) => truth(a, model) || truth(b, model),
        Formula::Implies(a, b) => !truth(a, model) || truth(b, model),
        Formula::Iff(a, b) => truth(a, model) == truth(b, model),
        Formula::Forall(..) | Formula::Exists(..) => unreachable!("quantifier-free input"),
    }
}

fn quick() -> ProverConfig {
    ProverConfig::default()
        .with_depth_limit(12)
        .with_time_limit_ms(2_000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn render_then_parse_is_identity(f in formula(6)) {
        let text = render_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn substitution_agrees_with_assignment(
        f in formula(5).prop_filter("quantified", |f| matches!(f, Formula::Forall(..) | Formula::Exists(..))),
        t in open_term(),
        seed in any::<u64>(),
        values in prop::array::uniform3(0..Model::SIZE),
    ) {
        let (Formula::Forall(v, body) | Formula::Exists(v, body)) = &f else { unreachable!() };
        let model = Model { seed };
        let mut env: BTreeMap<String, u64> = ["x", "y", "z"].iter().map(|v| v.to_string()).zip(values).collect();
        let substituted = model.holds(&substitute(body, v, &t), &mut env.clone());
        env.insert(v.clone(), model.term(&t, &env));
        prop_assert_eq!(substituted, model.holds(body, &mut env));
    }

    #[test]
    fn renaming_bound_variables_is_alpha_equal(f in formula(5)) {
        let g = rename_bound(&f, "u", &mut 0);
        let h = rename_bound(&g, "w", &mut 0);
        prop_assert!(alpha_eq(&f, &f));
        prop_assert!(alpha_eq(&f, &g) && alpha_eq(&g, &f));
        prop_assert!(alpha_eq(&g, &h) && alpha_eq(&f, &h));
        prop_assert_eq!(canonical_key(&f), canonical_key(&h));
    }

    #[test]
    fn alpha_equality_matches_canonical_keys(f in formula(3), g in formula(3)) {
        prop_assert_eq!(alpha_eq(&f, &g), alpha_eq(&g, &f));
        prop_assert_eq!(alpha_eq(&f, &g), canonical_key(&f) == canonical_key(&g));
    }

    #[test]
    fn propositional_rules_keep_countermodels(s in situation(propositional(&["P", "Q", "R"], 3), 3)) {
        countermodel_survives(&s)?;
    }

    #[test]
    fn first_order_steps_pass_the_checker(s in situation(formula(3), 2)) {
        for app in applicable_applications(&s, &ProverConfig::all_active()) {
            prop_assert_eq!(check_step(&s, &app), StepVerdict::Valid, "{:?}", app.rule);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn search_trees_are_settled_and_deterministic(s in situation(formula(3), 2)) {
        let cancel = CancelToken::new();
        let first = prooftutor::search::prove_situation(s.clone(), &quick(), &cancel);
        prop_assert_eq!(&propagate_status(&first.tree), &first.tree);
        if first.stats.elapsed_ms < 1_000 {
            let second = prooftutor::search::prove_situation(s, &quick(), &cancel);
            prop_assert_eq!(first.tree.to_json(), second.tree.to_json());
        }
        prop_assert!(first.tree.check_all_steps().is_empty());
    }

    #[test]
    fn proved_trees_simplify_and_narrate(goal in propositional(&["P", "Q"], 4)) {
        let kb = KnowledgeBase::default();
        let r = prove(&goal, &kb, &quick(), &CancelToken::new());
        prop_assume!(r.is_proved());
        let simple = simplify(&r.tree, SimplifyOptions::default()).unwrap();
        prop_assert!(simple.is_simplified());
        prop_assert_eq!(&simplify(&simple, SimplifyOptions::default()).unwrap(), &simple);
        prop_assert!(simple.check_all_steps().is_empty());

        let prose = render_proof_nl(&simple, &kb).unwrap();
        for block in prose.walk() {
            for text in &block.formulas {
                prop_assert!(parse_formula(text).is_ok(), "{}", text);
            }
        }
        let mut anchors = prose.anchors();
        anchors.sort_unstable();
        let mut nodes = preorder(&simple);
        nodes.sort_unstable();
        prop_assert_eq!(anchors, nodes);
    }
}
