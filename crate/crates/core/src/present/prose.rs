use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::document::{FormulaRef, KnowledgeBase};
use crate::formula::{alpha_eq, render_formula, render_term, substitute, Formula};
use crate::kernel::{ProofSituation, RuleApplication, RuleId, BIND_CONSTANT, BIND_TERM};
use crate::search::{NodeId, ProofTree};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("proof tree is not simplified")]
pub struct NotSimplified;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Premise {
    pub label: String,
    pub formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<FormulaRef>,
}

/// The prose for one application node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProseBlock {
    pub situation_id: NodeId,
    pub application_id: NodeId,
    pub rule: RuleId,
    pub text: String,
    /// Every formula quoted in `text` and the branch headings, as rendered.
    pub formulas: Vec<String>,
    /// One entry per child when the step splits the proof.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<ProseBranch>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProseBranch {
    pub heading: String,
    pub blocks: Vec<ProseBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProseDocument {
    pub goal: String,
    pub premises: Vec<Premise>,
    pub blocks: Vec<ProseBlock>,
}

impl ProseDocument {
    pub fn title(&self) -> String {
        let mut title = format!("Proof of {}", self.goal);
        if !self.premises.is_empty() {
            let used: Vec<String> = self
                .premises
                .iter()
                .map(|p| format!("({}) {}", p.label, p.formula))
                .collect();
            title.push_str(" using ");
            title.push_str(&used.join(", "));
        }
        title.push(':');
        title
    }

    /// All blocks in reading order.
    pub fn walk(&self) -> Vec<&ProseBlock> {
        fn go<'a>(blocks: &'a [ProseBlock], out: &mut Vec<&'a ProseBlock>) {
            for b in blocks {
                out.push(b);
                for branch in &b.branches {
                    go(&branch.blocks, out);
                }
            }
        }
        let mut out = Vec::new();
        go(&self.blocks, &mut out);
        out
    }

    /// Node ids the prose links to: each block's situation and application.
    pub fn anchors(&self) -> Vec<NodeId> {
        self.walk()
            .iter()
            .flat_map(|b| [b.situation_id, b.application_id])
            .collect()
    }
}

#[derive(Deserialize)]
struct Template {
    text: String,
    #[serde(default)]
    branches: Vec<String>,
}

fn templates() -> &'static BTreeMap<String, Template> {
    static TABLE: OnceLock<BTreeMap<String, Template>> = OnceLock::new();
    TABLE.get_or_init(|| {
        serde_json::from_str(include_str!("templates.json")).expect("template table parses")
    })
}

/// Description keys with a template, in table order.
pub fn template_keys() -> Vec<&'static str> {
    templates().keys().map(String::as_str).collect()
}

/// Renders a simplified proof tree as nested prose.
///
/// Assumptions elided by simplification are left out of the premise list.
pub fn render_proof_nl(
    tree: &ProofTree,
    kb: &KnowledgeBase,
) -> Result<ProseDocument, NotSimplified> {
    if !tree.is_simplified() {
        return Err(NotSimplified);
    }
    let root = tree.root_node();
    let premises = root
        .situation
        .assumptions
        .iter()
        .filter(|a| !tree.elided_assumptions.contains(&a.label))
        .map(|a| Premise {
            label: a.label.clone(),
            formula: render_formula(&a.formula),
            source: kb
                .entries
                .iter()
                .find(|e| alpha_eq(&e.formula, &a.formula))
                .map(|e| e.reference.clone()),
        })
        .collect();
    Ok(ProseDocument {
        goal: render_formula(&root.situation.goal),
        premises,
        blocks: blocks_from(tree, tree.root),
    })
}

/// The linear run of blocks starting at a situation node. Single-child steps
/// continue the run; splitting steps end it with branches.
fn blocks_from(tree: &ProofTree, mut situation_id: NodeId) -> Vec<ProseBlock> {
    let mut out = Vec::new();
    loop {
        let situation = tree
            .situation(situation_id)
            .expect("simplified tree is complete");
        let app_id = situation.alternatives[0];
        let app = tree
            .application(app_id)
            .expect("simplified tree is complete");
        let template = templates()
            .get(&app.application.description_key)
            .unwrap_or_else(|| &templates()[app.application.rule.as_str()]);
        let mut slots = Slots::new(&situation.situation, &app.application);
        let child_for_text = (app.children.len() == 1).then_some(0);
        let text = slots.fill(&template.text, child_for_text);
        let mut block = ProseBlock {
            situation_id,
            application_id: app_id,
            rule: app.application.rule,
            text,
            formulas: vec![],
            branches: vec![],
        };
        if app.children.len() == 1 {
            block.formulas = slots.formulas;
            out.push(block);
            situation_id = app.children[0];
            continue;
        }
        for (i, &child) in app.children.iter().enumerate() {
            let heading = template
                .branches
                .get(i)
                .map(|h| slots.fill(h, Some(i)))
                .unwrap_or_else(|| format!("Part {}:", i + 1));
            block.branches.push(ProseBranch {
                heading,
                blocks: blocks_from(tree, child),
            });
        }
        block.formulas = slots.formulas;
        out.push(block);
        return out;
    }
}

/// Placeholder values for one application, recording every formula used.
struct Slots<'a> {
    parent: &'a ProofSituation,
    app: &'a RuleApplication,
    formulas: Vec<String>,
}

impl<'a> Slots<'a> {
    fn new(parent: &'a ProofSituation, app: &'a RuleApplication) -> Self {
        Self {
            parent,
            app,
            formulas: Vec::new(),
        }
    }

    fn fill(&mut self, template: &str, child: Option<usize>) -> String {
        let mut out = String::new();
        let mut rest = template;
        while let Some(start) = rest.find('{') {
            out.push_str(&rest[..start]);
            let end = start + rest[start..].find('}').expect("closed placeholder");
            out.push_str(&self.value(&rest[start + 1..end], child));
            rest = &rest[end + 1..];
        }
        out.push_str(rest);
        out
    }

    fn value(&mut self, slot: &str, child: Option<usize>) -> String {
        let child = child.and_then(|i| self.app.children.get(i).map(|c| (i, c)));
        match slot {
            "goal" => self.labeled(self.parent.goal_label.clone(), &self.parent.goal.clone()),
            "refs" => self
                .app
                .focus
                .labels()
                .iter()
                .map(|l| format!("({l})"))
                .collect::<Vec<_>>()
                .join(" and "),
            "focus" => {
                let items: Vec<(String, Formula)> = self
                    .app
                    .focus
                    .labels()
                    .iter()
                    .filter_map(|l| {
                        self.parent
                            .assumption(l)
                            .map(|a| (a.label.clone(), a.formula.clone()))
                    })
                    .collect();
                let parts: Vec<String> = items
                    .into_iter()
                    .map(|(l, f)| self.labeled(Some(l), &f))
                    .collect();
                parts.join(" and ")
            }
            "show" => match child {
                Some((_, c)) => self.labeled(c.goal_label.clone(), &c.goal.clone()),
                None => String::new(),
            },
            "assume" => match child {
                Some((i, c)) => {
                    let parts: Vec<String> = introduced(self.parent, self.app, i)
                        .iter()
                        .map(|f| {
                            let label = c
                                .assumptions
                                .iter()
                                .find(|a| alpha_eq(&a.formula, f))
                                .map(|a| a.label.clone());
                            self.labeled(label, f)
                        })
                        .collect();
                    parts.join(" and ")
                }
                None => String::new(),
            },
            "witness" => {
                let term = self
                    .app
                    .bindings
                    .get(BIND_TERM)
                    .or_else(|| self.app.bindings.get(BIND_CONSTANT));
                term.map(render_term).unwrap_or_default()
            }
            other => panic!("unknown template placeholder {other}"),
        }
    }

    fn labeled(&mut self, label: Option<String>, f: &Formula) -> String {
        let text = render_formula(f);
        self.formulas.push(text.clone());
        match label {
            Some(l) => format!("({l}) {text}"),
            None => text,
        }
    }
}

/// The formulas a step assumes in its `child`-th child, whether or not they
/// were already among the assumptions.
fn introduced(parent: &ProofSituation, app: &RuleApplication, child: usize) -> Vec<Formula> {
    let focus: Vec<&Formula> = app
        .focus
        .labels()
        .iter()
        .filter_map(|l| parent.assumption(l))
        .map(|a| &a.formula)
        .collect();
    let witness = || {
        app.bindings
            .get(BIND_TERM)
            .or_else(|| app.bindings.get(BIND_CONSTANT))
    };
    match (app.rule, focus.as_slice(), &parent.goal) {
        (RuleId::ImplGoal, _, Formula::Implies(a, _)) => vec![(**a).clone()],
        (RuleId::NotGoal, _, Formula::Not(a)) => vec![(**a).clone()],
        (RuleId::ByContradiction, _, g) => vec![Formula::not(g.clone())],
        (RuleId::OrGoal, _, Formula::Or(a, _)) if app.description_key == "OrGoal.negation" => {
            vec![Formula::not((**a).clone())]
        }
        (RuleId::AndKB, [Formula::And(a, b)], _) => vec![(**a).clone(), (**b).clone()],
        (RuleId::IffKB, [Formula::Iff(a, b)], _) => vec![
            Formula::implies((**a).clone(), (**b).clone()),
            Formula::implies((**b).clone(), (**a).clone()),
        ],
        (RuleId::ModusPonensKB, [_, Formula::Implies(_, b)], _) => vec![(**b).clone()],
        (RuleId::OrKB, [Formula::Or(a, b)], _) => vec![if child == 0 {
            (**a).clone()
        } else {
            (**b).clone()
        }],
        (RuleId::ImplKB, [Formula::Implies(_, b)], _) => vec![(**b).clone()],
        (
            RuleId::ExistsKB | RuleId::ForallKB,
            [Formula::Exists(v, body) | Formula::Forall(v, body)],
            _,
        ) => witness()
            .map(|t| vec![substitute(body, v, t)])
            .unwrap_or_default(),
        _ => Vec::new(),
    }
}
