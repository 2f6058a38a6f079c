use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::rules::{Focus, RuleApplication, RuleId, BIND_CONSTANT, BIND_TERM};
use super::situation::{Assumption, ProofSituation};
use crate::formula::{
    alpha_eq, canonical_key, fresh_constant, ground_subterms, match_instance, substitute, Formula,
    Term,
};
use crate::search::ProverConfig;

#[derive(Debug, Error, PartialEq)]
#[error("rule application {rule} was not produced for this situation")]
pub struct InvalidApplication {
    pub rule: RuleId,
}

/// Hands out consecutive numeric labels for the formulas one application
/// introduces.
struct Labels(u32);

impl Labels {
    fn next(&mut self) -> String {
        let l = self.0;
        self.0 += 1;
        l.to_string()
    }
}

fn assume(child: &mut ProofSituation, f: &Formula, labels: &mut Labels) {
    if !child.assumes(f) {
        child.assumptions.push(Assumption {
            label: labels.next(),
            formula: f.clone(),
        });
    }
}

fn set_goal(child: &mut ProofSituation, goal: &Formula, labels: &mut Labels) {
    child.goal = goal.clone();
    child.goal_label = Some(labels.next());
}

fn app(rule: RuleId, focus: Focus, children: Vec<ProofSituation>) -> RuleApplication {
    RuleApplication {
        rule,
        focus,
        bindings: BTreeMap::new(),
        children,
        description_key: rule.as_str().to_string(),
    }
}

fn on(labels: &[&Assumption]) -> Focus {
    Focus::Assumptions(labels.iter().map(|a| a.label.clone()).collect())
}

/// The instantiation pool: every ground subterm of the situation.
pub fn term_pool(s: &ProofSituation) -> BTreeSet<Term> {
    ground_subterms(s.formulas())
}

/// Every application of an active rule to `s`, best first.
///
/// Ordered by effective priority, then catalog position, then assumption
/// order, then term-pool order.
pub fn applicable_applications(s: &ProofSituation, config: &ProverConfig) -> Vec<RuleApplication> {
    let mut rules: Vec<RuleId> = RuleId::ALL
        .into_iter()
        .filter(|&r| config.is_active(r))
        .collect();
    rules.sort_by_key(|&r| (config.priority(r), r.index()));
    rules
        .into_iter()
        .flat_map(|r| applications_of(r, s))
        .collect()
}

/// Applications of a single rule, in assumption and term-pool order.
pub fn applications_of(rule: RuleId, s: &ProofSituation) -> Vec<RuleApplication> {
    let mut out = Vec::new();
    let fresh_labels = || Labels(s.next_label());
    match rule {
        RuleId::GoalTrue => {
            if s.goal == Formula::Top {
                out.push(app(rule, Focus::Goal, vec![]));
            }
        }
        RuleId::ContradictionInKB => {
            for a in &s.assumptions {
                if a.formula == Formula::Bottom {
                    let mut closing = app(rule, on(&[a]), vec![]);
                    closing.description_key = "ContradictionInKB.false".into();
                    out.push(closing);
                }
                for b in &s.assumptions {
                    if matches!(&b.formula, Formula::Not(inner) if alpha_eq(inner, &a.formula)) {
                        out.push(app(rule, on(&[a, b]), vec![]));
                    }
                }
            }
        }
        RuleId::GoalInKB => {
            for a in s
                .assumptions
                .iter()
                .filter(|a| alpha_eq(&a.formula, &s.goal))
            {
                out.push(app(rule, on(&[a]), vec![]));
            }
        }
        RuleId::AndGoal => {
            if let Formula::And(l, r) = &s.goal {
                let mut labels = fresh_labels();
                let mut left = s.clone();
                set_goal(&mut left, l, &mut labels);
                let mut right = s.clone();
                set_goal(&mut right, r, &mut labels);
                out.push(app(rule, Focus::Goal, vec![left, right]));
            }
        }
        RuleId::ImplGoal => {
            if let Formula::Implies(l, r) = &s.goal {
                let mut labels = fresh_labels();
                let mut child = s.clone();
                assume(&mut child, l, &mut labels);
                set_goal(&mut child, r, &mut labels);
                out.push(app(rule, Focus::Goal, vec![child]));
            }
        }
        RuleId::IffGoal => {
            if let Formula::Iff(l, r) = &s.goal {
                let mut labels = fresh_labels();
                let mut forward = s.clone();
                set_goal(
                    &mut forward,
                    &Formula::implies((**l).clone(), (**r).clone()),
                    &mut labels,
                );
                let mut backward = s.clone();
                set_goal(
                    &mut backward,
                    &Formula::implies((**r).clone(), (**l).clone()),
                    &mut labels,
                );
                out.push(app(rule, Focus::Goal, vec![forward, backward]));
            }
        }
        RuleId::NotGoal => {
            if let Formula::Not(inner) = &s.goal {
                let mut labels = fresh_labels();
                let mut child = s.clone();
                assume(&mut child, inner, &mut labels);
                set_goal(&mut child, &Formula::Bottom, &mut labels);
                out.push(app(rule, Focus::Goal, vec![child]));
            }
        }
        RuleId::ForallGoal => {
            if let Formula::Forall(var, body) = &s.goal {
                let c = fresh_constant(&s.used_names(), var);
                let mut labels = fresh_labels();
                let mut child = s.clone();
                set_goal(
                    &mut child,
                    &substitute(body, var, &Term::Const(c.clone())),
                    &mut labels,
                );
                child.signature.insert(c.clone());
                let mut a = app(rule, Focus::Goal, vec![child]);
                a.bindings.insert(BIND_CONSTANT.into(), Term::Const(c));
                out.push(a);
            }
        }
        RuleId::AndKB => {
            for a in &s.assumptions {
                if let Formula::And(l, r) = &a.formula {
                    if s.assumes(l) && s.assumes(r) {
                        continue;
                    }
                    let mut labels = fresh_labels();
                    let mut child = s.clone();
                    assume(&mut child, l, &mut labels);
                    assume(&mut child, r, &mut labels);
                    out.push(app(rule, on(&[a]), vec![child]));
                }
            }
        }
        RuleId::IffKB => {
            for a in &s.assumptions {
                if let Formula::Iff(l, r) = &a.formula {
                    let forward = Formula::implies((**l).clone(), (**r).clone());
                    let backward = Formula::implies((**r).clone(), (**l).clone());
                    if s.assumes(&forward) && s.assumes(&backward) {
                        continue;
                    }
                    let mut labels = fresh_labels();
                    let mut child = s.clone();
                    assume(&mut child, &forward, &mut labels);
                    assume(&mut child, &backward, &mut labels);
                    out.push(app(rule, on(&[a]), vec![child]));
                }
            }
        }
        RuleId::ExistsKB => {
            for a in &s.assumptions {
                if let Formula::Exists(var, body) = &a.formula {
                    let witnessed =
                        s.assumptions
                            .iter()
                            .any(|b| match match_instance(body, var, &b.formula) {
                                Some(Some(t)) => t.is_ground(),
                                Some(None) => true,
                                None => false,
                            });
                    if witnessed {
                        continue;
                    }
                    let c = fresh_constant(&s.used_names(), var);
                    let mut labels = fresh_labels();
                    let mut child = s.clone();
                    assume(
                        &mut child,
                        &substitute(body, var, &Term::Const(c.clone())),
                        &mut labels,
                    );
                    child.signature.insert(c.clone());
                    let mut ap = app(rule, on(&[a]), vec![child]);
                    ap.bindings.insert(BIND_CONSTANT.into(), Term::Const(c));
                    out.push(ap);
                }
            }
        }
        RuleId::ModusPonensKB => {
            for imp in &s.assumptions {
                if let Formula::Implies(l, r) = &imp.formula {
                    if s.assumes(r) {
                        continue;
                    }
                    if let Some(premise) = s.assumptions.iter().find(|b| alpha_eq(&b.formula, l)) {
                        let mut labels = fresh_labels();
                        let mut child = s.clone();
                        assume(&mut child, r, &mut labels);
                        out.push(app(rule, on(&[premise, imp]), vec![child]));
                    }
                }
            }
        }
        RuleId::OrKB => {
            for a in &s.assumptions {
                if let Formula::Or(l, r) = &a.formula {
                    if s.assumes(l) || s.assumes(r) {
                        continue;
                    }
                    let mut labels = fresh_labels();
                    let mut left = s.clone();
                    assume(&mut left, l, &mut labels);
                    let mut right = s.clone();
                    assume(&mut right, r, &mut labels);
                    out.push(app(rule, on(&[a]), vec![left, right]));
                }
            }
        }
        RuleId::OrGoal => {
            if let Formula::Or(l, r) = &s.goal {
                let mut labels = fresh_labels();
                let mut left = s.clone();
                set_goal(&mut left, l, &mut labels);
                let mut a = app(rule, Focus::Goal, vec![left]);
                a.description_key = "OrGoal.left".into();
                out.push(a);

                let mut labels = fresh_labels();
                let mut right = s.clone();
                set_goal(&mut right, r, &mut labels);
                let mut a = app(rule, Focus::Goal, vec![right]);
                a.description_key = "OrGoal.right".into();
                out.push(a);

                let negated = Formula::not((**l).clone());
                if !s.assumes(&negated) {
                    let mut labels = fresh_labels();
                    let mut child = s.clone();
                    assume(&mut child, &negated, &mut labels);
                    set_goal(&mut child, r, &mut labels);
                    let mut a = app(rule, Focus::Goal, vec![child]);
                    a.description_key = "OrGoal.negation".into();
                    out.push(a);
                }
            }
        }
        RuleId::ExistsGoal => {
            if let Formula::Exists(var, body) = &s.goal {
                let pool = term_pool(s);
                for t in &pool {
                    let mut labels = fresh_labels();
                    let mut child = s.clone();
                    set_goal(&mut child, &substitute(body, var, t), &mut labels);
                    let mut a = app(rule, Focus::Goal, vec![child]);
                    a.bindings.insert(BIND_TERM.into(), t.clone());
                    out.push(a);
                }
                if pool.is_empty() {
                    let c = fresh_constant(&s.used_names(), var);
                    let mut labels = fresh_labels();
                    let mut child = s.clone();
                    set_goal(
                        &mut child,
                        &substitute(body, var, &Term::Const(c.clone())),
                        &mut labels,
                    );
                    child.signature.insert(c.clone());
                    let mut a = app(rule, Focus::Goal, vec![child]);
                    a.bindings.insert(BIND_CONSTANT.into(), Term::Const(c));
                    out.push(a);
                }
            }
        }
        RuleId::ForallKB => {
            let pool = term_pool(s);
            for a in &s.assumptions {
                if let Formula::Forall(var, body) = &a.formula {
                    let mut seen = BTreeSet::new();
                    for t in &pool {
                        let instance = substitute(body, var, t);
                        if s.assumes(&instance) || !seen.insert(canonical_key(&instance)) {
                            continue;
                        }
                        let mut labels = fresh_labels();
                        let mut child = s.clone();
                        assume(&mut child, &instance, &mut labels);
                        let mut ap = app(rule, on(&[a]), vec![child]);
                        ap.bindings.insert(BIND_TERM.into(), t.clone());
                        out.push(ap);
                    }
                }
            }
        }
        RuleId::NotKB => {
            if s.goal == Formula::Bottom {
                for a in &s.assumptions {
                    if let Formula::Not(inner) = &a.formula {
                        if **inner == Formula::Bottom {
                            continue;
                        }
                        let mut labels = fresh_labels();
                        let mut child = s.clone();
                        set_goal(&mut child, inner, &mut labels);
                        out.push(app(rule, on(&[a]), vec![child]));
                    }
                }
            }
        }
        RuleId::ImplKB => {
            for a in &s.assumptions {
                if let Formula::Implies(l, r) = &a.formula {
                    if s.assumes(l) || s.assumes(r) {
                        continue;
                    }
                    let mut labels = fresh_labels();
                    let mut premise = s.clone();
                    set_goal(&mut premise, l, &mut labels);
                    let mut conclusion = s.clone();
                    assume(&mut conclusion, r, &mut labels);
                    out.push(app(rule, on(&[a]), vec![premise, conclusion]));
                }
            }
        }
        RuleId::ByContradiction => {
            if s.goal != Formula::Bottom {
                let mut labels = fresh_labels();
                let mut child = s.clone();
                assume(&mut child, &Formula::not(s.goal.clone()), &mut labels);
                set_goal(&mut child, &Formula::Bottom, &mut labels);
                out.push(app(rule, Focus::Goal, vec![child]));
            }
        }
    }
    out
}

/// Performs `app` on `s`, returning the child situations.
///
/// Fails unless `app` is one of the applications the catalog yields for `s`.
pub fn apply(
    s: &ProofSituation,
    app: &RuleApplication,
) -> Result<Vec<ProofSituation>, InvalidApplication> {
    if applications_of(app.rule, s)
        .iter()
        .any(|candidate| candidate == app)
    {
        Ok(app.children.clone())
    } else {
        Err(InvalidApplication { rule: app.rule })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::KnowledgeBase;
    use crate::formula::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn situation(goal: &str, kb: &[(&str, &str)]) -> ProofSituation {
        let kb = KnowledgeBase::from_formulas(kb.iter().map(|(l, f)| (*l, p(f))));
        ProofSituation::initial(p(goal), &kb)
    }

    fn rules(apps: &[RuleApplication]) -> Vec<RuleId> {
        apps.iter().map(|a| a.rule).collect()
    }

    #[test]
    fn conjunction_goal_only_and_goal() {
        let s = situation("A & B", &[]);
        assert_eq!(
            rules(&applicable_applications(&s, &ProverConfig::default())),
            [RuleId::AndGoal]
        );
    }

    #[test]
    fn goal_in_kb_first() {
        let s = situation("A", &[("T.1", "A")]);
        let apps = applicable_applications(&s, &ProverConfig::default());
        assert_eq!(apps[0].rule, RuleId::GoalInKB);
        assert_eq!(apps[0].focus, Focus::Assumptions(vec!["T.1".into()]));
    }

    #[test]
    fn deactivation_leaves_only_by_contradiction() {
        let s = situation("A & B", &[]);
        let config = ProverConfig::default()
            .with_rule(RuleId::AndGoal, false)
            .with_rule(RuleId::ByContradiction, true);
        assert_eq!(
            rules(&applicable_applications(&s, &config)),
            [RuleId::ByContradiction]
        );
        let config = ProverConfig::default().with_rule(RuleId::AndGoal, false);
        assert!(applicable_applications(&s, &config).is_empty());
    }

    #[test]
    fn implication_goal() {
        let s = situation("A -> B", &[]);
        let apps = applications_of(RuleId::ImplGoal, &s);
        let kids = apply(&s, &apps[0]).unwrap();
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].goal, p("B"));
        assert_eq!(
            kids[0].assumptions,
            vec![Assumption {
                label: "1".into(),
                formula: p("A")
            }]
        );
        assert_eq!(kids[0].goal_label.as_deref(), Some("2"));
    }

    #[test]
    fn forall_goal_introduces_fresh_constant() {
        let s = situation("forall x. P(x) | Q(a)", &[]);
        let apps = applications_of(RuleId::ForallGoal, &s);
        assert_eq!(apps[0].fresh_constant(), Some("x"));
        let s = situation("forall x. P(x) | Q(x0) | Q(x)", &[("K.1", "R(x)")]);
        let apps = applications_of(RuleId::ForallGoal, &s);
        let kids = apply(&s, &apps[0]).unwrap();
        assert_eq!(apps[0].fresh_constant(), Some("x1"));
        assert_eq!(kids[0].goal, p("P(x1) | Q(x0) | Q(x1)"));
        assert!(kids[0].signature.contains("x1"));
    }

    #[test]
    fn forall_goal_with_signature() {
        let mut s = situation("forall x. P(x)", &[]);
        s.signature.insert("a".into());
        let kids = apply(&s, &applications_of(RuleId::ForallGoal, &s)[0]).unwrap();
        assert_eq!(kids[0].goal, p("P(x)"));
        assert_eq!(
            kids[0].signature,
            BTreeSet::from(["a".to_string(), "x".to_string()])
        );
    }

    #[test]
    fn goal_in_kb_closes() {
        let s = situation("A", &[("T.1", "A")]);
        let apps = applications_of(RuleId::GoalInKB, &s);
        assert_eq!(apply(&s, &apps[0]).unwrap(), vec![]);
    }

    #[test]
    fn apply_rejects_foreign_application() {
        let s = situation("A -> B", &[]);
        let other = situation("C -> D", &[]);
        let app = applications_of(RuleId::ImplGoal, &other).remove(0);
        assert_eq!(
            apply(&s, &app),
            Err(InvalidApplication {
                rule: RuleId::ImplGoal
            })
        );
    }

    #[test]
    fn loop_control_for_kb_rules() {
        let s = situation("G", &[("K.1", "A & B"), ("K.2", "A"), ("K.3", "B")]);
        assert!(applications_of(RuleId::AndKB, &s).is_empty());
        let s = situation("G", &[("K.1", "A -> B"), ("K.2", "A"), ("K.3", "B")]);
        assert!(applications_of(RuleId::ModusPonensKB, &s).is_empty());
        let s = situation("G", &[("K.1", "A | B"), ("K.2", "A")]);
        assert!(applications_of(RuleId::OrKB, &s).is_empty());
        let s = situation("G", &[("K.1", "exists x. P(x)"), ("K.2", "P(a)")]);
        assert!(applications_of(RuleId::ExistsKB, &s).is_empty());
        let s = situation("G", &[("K.1", "forall x. P(x)"), ("K.2", "P(a)")]);
        assert!(applications_of(RuleId::ForallKB, &s).is_empty());
    }

    #[test]
    fn forall_kb_enumerates_pool() {
        let s = situation(
            "Q(b)",
            &[("K.1", "forall x. P(x) -> Q(x)"), ("K.2", "P(a)")],
        );
        let apps = applications_of(RuleId::ForallKB, &s);
        let terms: Vec<_> = apps
            .iter()
            .map(|a| a.bindings[BIND_TERM].to_string())
            .collect();
        assert_eq!(terms, ["a", "b"]);
        assert_eq!(
            apps[0].children[0].assumptions[2].formula,
            p("P(a) -> Q(a)")
        );
    }

    #[test]
    fn or_goal_alternatives() {
        let s = situation("A | B", &[]);
        let apps = applications_of(RuleId::OrGoal, &s);
        let keys: Vec<_> = apps.iter().map(|a| a.description_key.as_str()).collect();
        assert_eq!(keys, ["OrGoal.left", "OrGoal.right", "OrGoal.negation"]);
        assert_eq!(apps[2].children[0].goal, p("B"));
        assert!(apps[2].children[0].assumes(&p("!A")));
    }

    #[test]
    fn exists_goal_pool_and_fresh() {
        let s = situation("exists x. P(x)", &[("K.1", "P(f(b))")]);
        let apps = applications_of(RuleId::ExistsGoal, &s);
        let terms: Vec<_> = apps
            .iter()
            .map(|a| a.bindings[BIND_TERM].to_string())
            .collect();
        assert_eq!(terms, ["b", "f(b)"]);
        let s = situation("exists x. P(x)", &[]);
        let apps = applications_of(RuleId::ExistsGoal, &s);
        assert_eq!(apps.len(), 1);
        assert_eq!(apps[0].fresh_constant(), Some("x"));
    }

    #[test]
    fn contradiction_and_negation_rules() {
        let s = situation("G", &[("K.1", "A"), ("K.2", "!A")]);
        let apps = applications_of(RuleId::ContradictionInKB, &s);
        assert_eq!(
            apps[0].focus,
            Focus::Assumptions(vec!["K.1".into(), "K.2".into()])
        );
        let s = situation("false", &[("K.1", "!(A -> B)")]);
        let apps = applications_of(RuleId::NotKB, &s);
        assert_eq!(apps[0].children[0].goal, p("A -> B"));
        assert!(applications_of(RuleId::ByContradiction, &s).is_empty());
    }

    #[test]
    fn priorities_reorder() {
        let s = situation("A & B", &[("K.1", "C & D")]);
        let apps = applicable_applications(&s, &ProverConfig::default());
        assert_eq!(rules(&apps), [RuleId::AndGoal, RuleId::AndKB]);
        let config = ProverConfig::default().with_priority(RuleId::AndKB, 1);
        assert_eq!(
            rules(&applicable_applications(&s, &config)),
            [RuleId::AndKB, RuleId::AndGoal]
        );
    }

    #[test]
    fn children_are_valid_situations() {
        let s = situation(
            "forall x. exists y. R(x, y) | !P(x)",
            &[
                ("K.1", "exists z. P(z) & Q"),
                ("K.2", "forall x. P(x) -> R(x, c)"),
            ],
        );
        for app in applicable_applications(&s, &ProverConfig::all_active()) {
            for c in &app.children {
                c.validate().unwrap();
            }
        }
    }
}
