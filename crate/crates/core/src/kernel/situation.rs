use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::document::KnowledgeBase;
use crate::formula::{alpha_eq, canonical_key, Formula};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assumption {
    pub label: String,
    pub formula: Formula,
}

/// A goal to be shown from labeled assumptions, with the constants in scope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofSituation {
    pub goal: Formula,
    /// Numeric label of the goal, absent for the root goal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_label: Option<String>,
    pub assumptions: Vec<Assumption>,
    pub signature: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SituationError {
    NotClosed(String),
    ConstantOutsideSignature(String),
    DuplicateLabel(String),
}

impl ProofSituation {
    /// The root situation for `goal` with the knowledge base as assumptions.
    pub fn initial(goal: Formula, kb: &KnowledgeBase) -> Self {
        let mut assumptions: Vec<Assumption> = Vec::with_capacity(kb.len());
        for entry in &kb.entries {
            let mut label = entry.display_label.clone();
            if assumptions.iter().any(|a| a.label == label) {
                label = format!("{}:{}", entry.reference.document, entry.display_label);
            }
            assumptions.push(Assumption {
                label,
                formula: entry.formula.clone(),
            });
        }
        let mut signature = goal.constants();
        for a in &assumptions {
            signature.extend(a.formula.constants());
        }
        Self {
            goal,
            goal_label: None,
            assumptions,
            signature,
        }
    }

    pub fn validate(&self) -> Result<(), SituationError> {
        let formulas = std::iter::once(("goal", &self.goal)).chain(
            self.assumptions
                .iter()
                .map(|a| (a.label.as_str(), &a.formula)),
        );
        for (label, f) in formulas {
            if !f.is_closed() {
                return Err(SituationError::NotClosed(label.to_string()));
            }
            if let Some(c) = f
                .constants()
                .into_iter()
                .find(|c| !self.signature.contains(c))
            {
                return Err(SituationError::ConstantOutsideSignature(c));
            }
        }
        let mut labels = BTreeSet::new();
        for a in &self.assumptions {
            if !labels.insert(a.label.as_str()) {
                return Err(SituationError::DuplicateLabel(a.label.clone()));
            }
        }
        Ok(())
    }

    pub fn assumption(&self, label: &str) -> Option<&Assumption> {
        self.assumptions.iter().find(|a| a.label == label)
    }

    /// Whether a formula alpha-equal to `f` is already assumed.
    pub fn assumes(&self, f: &Formula) -> bool {
        self.assumptions.iter().any(|a| alpha_eq(&a.formula, f))
    }

    /// One past the largest numeric label in use.
    pub fn next_label(&self) -> u32 {
        self.assumptions
            .iter()
            .map(|a| a.label.as_str())
            .chain(self.goal_label.as_deref())
            .filter_map(|l| l.parse::<u32>().ok())
            .max()
            .map_or(1, |m| m + 1)
    }

    /// Every identifier a freshly introduced constant has to avoid.
    pub fn used_names(&self) -> BTreeSet<String> {
        let mut names = self.signature.clone();
        for f in std::iter::once(&self.goal).chain(self.assumptions.iter().map(|a| &a.formula)) {
            names.extend(f.constants());
            names.extend(f.functions().into_iter().map(|(name, _)| name));
        }
        names
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        std::iter::once(&self.goal).chain(self.assumptions.iter().map(|a| &a.formula))
    }

    /// Identifies the situation up to labels, assumption order and renaming
    /// of bound variables.
    pub fn key(&self) -> (String, BTreeSet<String>) {
        (
            canonical_key(&self.goal),
            self.assumptions
                .iter()
                .map(|a| canonical_key(&a.formula))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn initial_situation_collects_signature() {
        let kb = KnowledgeBase::from_formulas([
            ("A.1", p("forall x. P(x) -> Q(x)")),
            ("A.2", p("P(a)")),
        ]);
        let s = ProofSituation::initial(p("Q(b)"), &kb);
        assert_eq!(
            s.signature,
            BTreeSet::from(["a".to_string(), "b".to_string()])
        );
        assert_eq!(s.assumptions[1].label, "A.2");
        assert_eq!(s.next_label(), 1);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn validation_errors() {
        let mut s = ProofSituation::initial(p("P(a)"), &KnowledgeBase::default());
        s.signature.clear();
        assert_eq!(
            s.validate(),
            Err(SituationError::ConstantOutsideSignature("a".into()))
        );

        let mut s = ProofSituation::initial(p("P"), &KnowledgeBase::default());
        s.assumptions.push(Assumption {
            label: "1".into(),
            formula: p("Q"),
        });
        s.assumptions.push(Assumption {
            label: "1".into(),
            formula: p("R"),
        });
        assert_eq!(
            s.validate(),
            Err(SituationError::DuplicateLabel("1".into()))
        );
        assert_eq!(s.next_label(), 2);
    }

    #[test]
    fn keys_ignore_labels_and_order() {
        let mut a = ProofSituation::initial(p("P"), &KnowledgeBase::default());
        a.assumptions = vec![
            Assumption {
                label: "1".into(),
                formula: p("Q"),
            },
            Assumption {
                label: "2".into(),
                formula: p("forall x. R(x)"),
            },
        ];
        let mut b = a.clone();
        b.assumptions = vec![
            Assumption {
                label: "7".into(),
                formula: p("forall y. R(y)"),
            },
            Assumption {
                label: "8".into(),
                formula: p("Q"),
            },
        ];
        assert_eq!(a.key(), b.key());
    }
}
