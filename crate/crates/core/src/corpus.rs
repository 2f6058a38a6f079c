//! Bundled example documents and a catalog of proof problems over them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::document::{build_knowledge_base, Document, DocumentError, FormulaRef, KnowledgeBase};
use crate::formula::Formula;

const SOURCES: [(&str, &str); 4] = [
    ("intro", include_str!("../corpus/intro.tmadoc.json")),
    ("classics", include_str!("../corpus/classics.tmadoc.json")),
    ("ground", include_str!("../corpus/ground.tmadoc.json")),
    ("stress", include_str!("../corpus/stress.tmadoc.json")),
];

const PROBLEMS: &str = include_str!("../corpus/problems.json");

/// A goal from one document together with the formulas to prove it from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub name: String,
    pub document: String,
    /// `Env.label` of the goal.
    pub goal: String,
    /// Entries are `Env.label` for one formula or `Env` for all of them.
    pub kb: Vec<String>,
    /// Meant to exhaust time limits rather than finish.
    #[serde(default)]
    pub stress: bool,
}

impl Problem {
    pub fn goal_ref(&self) -> FormulaRef {
        let (env, label) = self.goal.rsplit_once('.').unwrap_or((&self.goal, ""));
        FormulaRef::new(&self.document, env, label)
    }

    /// Expands the `kb` entries against `doc`.
    pub fn selection(&self, doc: &Document) -> BTreeSet<FormulaRef> {
        let mut out = BTreeSet::new();
        for item in &self.kb {
            match (doc.environment(item), item.rsplit_once('.')) {
                (Some(env), _) => {
                    out.extend(
                        env.formulas
                            .iter()
                            .map(|lf| FormulaRef::new(&doc.id, &env.name, &lf.label)),
                    );
                }
                (None, Some((env, label))) => {
                    out.insert(FormulaRef::new(&doc.id, env, label));
                }
                (None, None) => {
                    out.insert(FormulaRef::new(&doc.id, item.as_str(), ""));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub problems: Vec<Problem>,
}

#[derive(Deserialize)]
struct ProblemFile {
    problems: Vec<Problem>,
}

impl Corpus {
    /// The documents and problems shipped with the crate.
    pub fn bundled() -> Self {
        let documents = SOURCES
            .iter()
            .map(|(name, text)| {
                Document::from_json(text).unwrap_or_else(|e| panic!("bundled document {name}: {e}"))
            })
            .collect();
        let problems = serde_json::from_str::<ProblemFile>(PROBLEMS)
            .expect("bundled problem list")
            .problems;
        Self {
            documents,
            problems,
        }
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn problem(&self, name: &str) -> Option<&Problem> {
        self.problems.iter().find(|p| p.name == name)
    }

    /// Problems whose name starts with `prefix`.
    pub fn problems_named<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Problem> + 'a {
        self.problems
            .iter()
            .filter(move |p| p.name.starts_with(prefix))
    }

    /// The goal formula and knowledge base of `problem`.
    pub fn instance(&self, problem: &Problem) -> Result<(Formula, KnowledgeBase), DocumentError> {
        let goal_ref = problem.goal_ref();
        let doc = self
            .document(&problem.document)
            .ok_or_else(|| DocumentError::Resolve(goal_ref.clone()))?;
        let goal = doc
            .resolve(&goal_ref)
            .ok_or_else(|| DocumentError::Resolve(goal_ref.clone()))?
            .clone();
        let kb = build_knowledge_base(std::slice::from_ref(doc), &problem.selection(doc))?;
        Ok((goal, kb))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_problem_resolves() {
        let corpus = Corpus::bundled();
        assert!(corpus.problems.len() >= 80);
        for p in &corpus.problems {
            let (_, kb) = corpus
                .instance(p)
                .unwrap_or_else(|e| panic!("{}: {e}", p.name));
            assert!(kb.get(&p.goal).is_none(), "{} uses its own goal", p.name);
        }
    }

    #[test]
    fn whole_environment_selection() {
        let corpus = Corpus::bundled();
        let (goal, kb) = corpus
            .instance(corpus.problem("case-split").unwrap())
            .unwrap();
        assert_eq!(goal.to_string(), "C");
        let labels: Vec<_> = kb
            .entries
            .iter()
            .map(|e| e.display_label.as_str())
            .collect();
        assert_eq!(labels, ["Cases.1", "Cases.2", "Cases.3"]);
    }

    #[test]
    fn ground_set_is_small_signature() {
        let corpus = Corpus::bundled();
        let ground: Vec<_> = corpus.problems_named("ground-").collect();
        assert!(ground.len() >= 50);
        for p in ground {
            let (goal, kb) = corpus.instance(p).unwrap();
            let mut constants = goal.constants();
            let mut preds = goal.predicates();
            for e in &kb.entries {
                constants.extend(e.formula.constants());
                preds.extend(e.formula.predicates());
            }
            assert!(constants.len() <= 2 && preds.len() <= 2, "{}", p.name);
        }
    }
}
