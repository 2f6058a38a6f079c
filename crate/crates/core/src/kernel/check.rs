//! Independent step checker.
//!
//! Re-derives each step from the rule definitions without going through
//! [`applicable_applications`](super::applicable_applications), so it can be
//! used to audit trees produced by the search engine.

use super::rules::{Focus, RuleApplication, RuleId, BIND_CONSTANT, BIND_TERM};
use super::situation::ProofSituation;
use crate::formula::{alpha_eq, substitute, Formula, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepVerdict {
    Valid,
    Invalid(String),
}

impl StepVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, StepVerdict::Valid)
    }
}

type Check = Result<(), String>;

fn ensure(cond: bool, reason: &str) -> Check {
    if cond {
        Ok(())
    } else {
        Err(reason.to_string())
    }
}

/// Decides whether `app` is a legitimate instance of its rule at `s`.
pub fn check_step(s: &ProofSituation, app: &RuleApplication) -> StepVerdict {
    match check(s, app) {
        Ok(()) => StepVerdict::Valid,
        Err(reason) => StepVerdict::Invalid(reason),
    }
}

fn check(s: &ProofSituation, app: &RuleApplication) -> Check {
    s.validate()
        .map_err(|e| format!("parent situation invalid: {e:?}"))?;
    for child in &app.children {
        child
            .validate()
            .map_err(|e| format!("child situation invalid: {e:?}"))?;
        ensure(
            child.signature.is_superset(&s.signature),
            "child signature lost constants",
        )?;
        ensure(
            child
                .signature
                .difference(&s.signature)
                .all(|c| Some(c.as_str()) == app.fresh_constant()),
            "unexpected new constant in child signature",
        )?;
        ensure(
            child.assumptions.len() >= s.assumptions.len()
                && s.assumptions
                    .iter()
                    .zip(&child.assumptions)
                    .all(|(a, b)| a == b),
            "child dropped or changed an assumption",
        )?;
    }
    let focus = focused(s, &app.focus)?;
    let goal = &s.goal;
    let kids = &app.children;

    match app.rule {
        RuleId::GoalTrue => {
            ensure(*goal == Formula::Top, "goal is not true")?;
            closing(kids)
        }
        RuleId::ContradictionInKB => {
            match focus.as_slice() {
                [f] => ensure(**f == Formula::Bottom, "assumption is not false")?,
                [a, b] => ensure(
                    matches!(b, Formula::Not(inner) if alpha_eq(inner, a)),
                    "assumptions do not contradict each other",
                )?,
                _ => return Err("contradiction needs one or two assumptions".into()),
            }
            closing(kids)
        }
        RuleId::GoalInKB => {
            let [f] = focus.as_slice() else {
                return Err("expected one assumption".into());
            };
            ensure(alpha_eq(f, goal), "goal not among assumptions")?;
            closing(kids)
        }
        RuleId::AndGoal => {
            let Formula::And(l, r) = goal else {
                return Err("goal is not a conjunction".into());
            };
            goal_rule(&app.focus)?;
            let [left, right] = kids.as_slice() else {
                return Err("expected two children".into());
            };
            shows(left, l)?;
            shows(right, r)?;
            adds(s, left, &[])?;
            adds(s, right, &[])
        }
        RuleId::ImplGoal => {
            let Formula::Implies(l, r) = goal else {
                return Err("goal is not an implication".into());
            };
            goal_rule(&app.focus)?;
            let child = single(kids)?;
            shows(child, r)?;
            adds(s, child, &[l])
        }
        RuleId::IffGoal => {
            let Formula::Iff(l, r) = goal else {
                return Err("goal is not an equivalence".into());
            };
            goal_rule(&app.focus)?;
            let [fwd, bwd] = kids.as_slice() else {
                return Err("expected two children".into());
            };
            shows(fwd, &Formula::implies((**l).clone(), (**r).clone()))?;
            shows(bwd, &Formula::implies((**r).clone(), (**l).clone()))?;
            adds(s, fwd, &[])?;
            adds(s, bwd, &[])
        }
        RuleId::NotGoal => {
            let Formula::Not(inner) = goal else {
                return Err("goal is not a negation".into());
            };
            goal_rule(&app.focus)?;
            let child = single(kids)?;
            shows(child, &Formula::Bottom)?;
            adds(s, child, &[inner])
        }
        RuleId::ForallGoal => {
            let Formula::Forall(var, body) = goal else {
                return Err("goal is not universal".into());
            };
            goal_rule(&app.focus)?;
            let child = single(kids)?;
            let c = fresh(s, app)?;
            ensure(
                child.signature.contains(&c),
                "fresh constant missing from signature",
            )?;
            shows(child, &substitute(body, var, &Term::Const(c)))?;
            adds(s, child, &[])
        }
        RuleId::AndKB => {
            let [Formula::And(l, r)] = focus.as_slice() else {
                return Err("assumption is not a conjunction".into());
            };
            let child = single(kids)?;
            shows(child, goal)?;
            ensure(!(s.assumes(l) && s.assumes(r)), "conjuncts already assumed")?;
            adds(s, child, &[l, r])
        }
        RuleId::IffKB => {
            let [Formula::Iff(l, r)] = focus.as_slice() else {
                return Err("assumption is not an equivalence".into());
            };
            let child = single(kids)?;
            shows(child, goal)?;
            let forward = Formula::implies((**l).clone(), (**r).clone());
            let backward = Formula::implies((**r).clone(), (**l).clone());
            ensure(
                !(s.assumes(&forward) && s.assumes(&backward)),
                "implications already assumed",
            )?;
            adds(s, child, &[&forward, &backward])
        }
        RuleId::ExistsKB => {
            let [Formula::Exists(var, body)] = focus.as_slice() else {
                return Err("assumption is not existential".into());
            };
            let child = single(kids)?;
            let c = fresh(s, app)?;
            ensure(
                child.signature.contains(&c),
                "fresh constant missing from signature",
            )?;
            shows(child, goal)?;
            let instance = substitute(body, var, &Term::Const(c));
            adds(s, child, &[&instance])?;
            ensure(child.assumes(&instance), "witness instance not assumed")
        }
        RuleId::ModusPonensKB => {
            let [premise, Formula::Implies(l, r)] = focus.as_slice() else {
                return Err("expected a premise and an implication".into());
            };
            ensure(
                alpha_eq(premise, l),
                "premise does not match the implication",
            )?;
            ensure(!s.assumes(r), "conclusion already assumed")?;
            let child = single(kids)?;
            shows(child, goal)?;
            adds(s, child, &[r])?;
            ensure(child.assumes(r), "conclusion not assumed")
        }
        RuleId::OrKB => {
            let [Formula::Or(l, r)] = focus.as_slice() else {
                return Err("assumption is not a disjunction".into());
            };
            let [left, right] = kids.as_slice() else {
                return Err("expected two cases".into());
            };
            shows(left, goal)?;
            shows(right, goal)?;
            adds(s, left, &[l])?;
            adds(s, right, &[r])?;
            ensure(
                left.assumes(l) && right.assumes(r),
                "case hypothesis missing",
            )
        }
        RuleId::OrGoal => {
            let Formula::Or(l, r) = goal else {
                return Err("goal is not a disjunction".into());
            };
            goal_rule(&app.focus)?;
            let child = single(kids)?;
            let negated = Formula::not((**l).clone());
            let left = shows(child, l).and_then(|_| adds(s, child, &[]));
            let right = shows(child, r).and_then(|_| adds(s, child, &[]));
            let third = shows(child, r).and_then(|_| adds(s, child, &[&negated]));
            left.or(right)
                .or(third)
                .map_err(|_| "child is none of the disjunction alternatives".to_string())
        }
        RuleId::ExistsGoal => {
            let Formula::Exists(var, body) = goal else {
                return Err("goal is not existential".into());
            };
            goal_rule(&app.focus)?;
            let child = single(kids)?;
            let witness = match (app.bindings.get(BIND_TERM), app.bindings.get(BIND_CONSTANT)) {
                (Some(t), None) => {
                    ensure(t.is_ground(), "witness is not ground")?;
                    let mut consts = Formula::atom("W", vec![t.clone()]).constants().into_iter();
                    ensure(
                        consts.all(|c| s.signature.contains(&c)),
                        "witness uses constants outside the signature",
                    )?;
                    t.clone()
                }
                (None, Some(_)) => Term::Const(fresh(s, app)?),
                _ => return Err("expected exactly one witness binding".into()),
            };
            shows(child, &substitute(body, var, &witness))?;
            adds(s, child, &[])
        }
        RuleId::ForallKB => {
            let [Formula::Forall(var, body)] = focus.as_slice() else {
                return Err("assumption is not universal".into());
            };
            let t = app
                .bindings
                .get(BIND_TERM)
                .ok_or("missing instantiation term")?;
            ensure(t.is_ground(), "instantiation term is not ground")?;
            let consts = Formula::atom("W", vec![t.clone()]).constants();
            ensure(
                consts.iter().all(|c| s.signature.contains(c)),
                "term uses constants outside the signature",
            )?;
            let instance = substitute(body, var, t);
            ensure(!s.assumes(&instance), "instance already assumed")?;
            let child = single(kids)?;
            shows(child, goal)?;
            adds(s, child, &[&instance])?;
            ensure(child.assumes(&instance), "instance not assumed")
        }
        RuleId::NotKB => {
            let [Formula::Not(inner)] = focus.as_slice() else {
                return Err("assumption is not a negation".into());
            };
            ensure(*goal == Formula::Bottom, "goal is not false")?;
            let child = single(kids)?;
            shows(child, inner)?;
            adds(s, child, &[])
        }
        RuleId::ImplKB => {
            let [Formula::Implies(l, r)] = focus.as_slice() else {
                return Err("assumption is not an implication".into());
            };
            ensure(
                !s.assumes(l) && !s.assumes(r),
                "modus ponens applies directly",
            )?;
            let [premise, conclusion] = kids.as_slice() else {
                return Err("expected two children".into());
            };
            shows(premise, l)?;
            adds(s, premise, &[])?;
            shows(conclusion, goal)?;
            adds(s, conclusion, &[r])
        }
        RuleId::ByContradiction => {
            ensure(*goal != Formula::Bottom, "goal is already false")?;
            goal_rule(&app.focus)?;
            let child = single(kids)?;
            shows(child, &Formula::Bottom)?;
            let negated = Formula::not(goal.clone());
            adds(s, child, &[&negated])?;
            ensure(child.assumes(&negated), "negated goal not assumed")
        }
    }
}

fn focused<'a>(s: &'a ProofSituation, focus: &Focus) -> Result<Vec<&'a Formula>, String> {
    focus
        .labels()
        .iter()
        .map(|l| {
            s.assumption(l)
                .map(|a| &a.formula)
                .ok_or_else(|| format!("no assumption labeled {l}"))
        })
        .collect()
}

fn goal_rule(focus: &Focus) -> Check {
    ensure(*focus == Focus::Goal, "rule acts on the goal")
}

fn closing(kids: &[ProofSituation]) -> Check {
    ensure(kids.is_empty(), "closing rule with children")
}

fn single(kids: &[ProofSituation]) -> Result<&ProofSituation, String> {
    match kids {
        [child] => Ok(child),
        _ => Err(format!("expected one child, found {}", kids.len())),
    }
}

fn shows(child: &ProofSituation, goal: &Formula) -> Check {
    ensure(
        alpha_eq(&child.goal, goal),
        "child goal does not match the rule",
    )
}

/// The child keeps the parent's assumptions and adds nothing beyond `allowed`.
fn adds(parent: &ProofSituation, child: &ProofSituation, allowed: &[&Formula]) -> Check {
    for extra in &child.assumptions[parent.assumptions.len()..] {
        ensure(
            allowed.iter().any(|f| alpha_eq(f, &extra.formula)),
            &format!("unexpected assumption {}", extra.formula),
        )?;
        ensure(!parent.assumes(&extra.formula), "assumption added twice")?;
    }
    Ok(())
}

/// The constant bound by the application, required to be new.
fn fresh(s: &ProofSituation, app: &RuleApplication) -> Result<String, String> {
    let c = app.fresh_constant().ok_or("missing fresh constant")?;
    let occurs = s.signature.contains(c) || s.used_names().contains(c);
    ensure(!occurs, "constant not fresh")?;
    Ok(c.to_string())
}
