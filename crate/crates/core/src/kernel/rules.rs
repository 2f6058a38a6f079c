use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::situation::ProofSituation;
use crate::formula::Term;

/// Stable identifier of an inference rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    GoalTrue,
    ContradictionInKB,
    GoalInKB,
    AndGoal,
    ImplGoal,
    IffGoal,
    NotGoal,
    ForallGoal,
    AndKB,
    IffKB,
    ExistsKB,
    ModusPonensKB,
    OrKB,
    OrGoal,
    ExistsGoal,
    ForallKB,
    NotKB,
    ImplKB,
    ByContradiction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleKind {
    #[serde(rename = "goal-rule")]
    Goal,
    #[serde(rename = "kb-rule")]
    Kb,
    #[serde(rename = "closing-rule")]
    Closing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDescriptor {
    pub id: RuleId,
    pub display_name: String,
    /// 1 is tried first.
    pub default_priority: u32,
    pub default_active: bool,
    pub kind: RuleKind,
}

// (id, display name, priority, active, kind), in catalog order.
const CATALOG: [(RuleId, &str, u32, bool, RuleKind); 19] = [
    (RuleId::GoalTrue, "Goal is true", 1, true, RuleKind::Closing),
    (
        RuleId::ContradictionInKB,
        "Contradiction in the assumptions",
        1,
        true,
        RuleKind::Closing,
    ),
    (
        RuleId::GoalInKB,
        "Goal among the assumptions",
        2,
        true,
        RuleKind::Closing,
    ),
    (
        RuleId::AndGoal,
        "Prove a conjunction",
        3,
        true,
        RuleKind::Goal,
    ),
    (
        RuleId::ImplGoal,
        "Prove an implication",
        4,
        true,
        RuleKind::Goal,
    ),
    (
        RuleId::IffGoal,
        "Prove an equivalence",
        5,
        true,
        RuleKind::Goal,
    ),
    (RuleId::NotGoal, "Prove a negation", 6, true, RuleKind::Goal),
    (
        RuleId::ForallGoal,
        "Prove a universal statement",
        7,
        true,
        RuleKind::Goal,
    ),
    (
        RuleId::AndKB,
        "Split an assumed conjunction",
        8,
        true,
        RuleKind::Kb,
    ),
    (
        RuleId::IffKB,
        "Split an assumed equivalence",
        8,
        true,
        RuleKind::Kb,
    ),
    (
        RuleId::ExistsKB,
        "Use an existential assumption",
        9,
        true,
        RuleKind::Kb,
    ),
    (
        RuleId::ModusPonensKB,
        "Modus ponens",
        10,
        true,
        RuleKind::Kb,
    ),
    (RuleId::OrKB, "Case distinction", 11, true, RuleKind::Kb),
    (
        RuleId::OrGoal,
        "Prove a disjunction",
        12,
        true,
        RuleKind::Goal,
    ),
    (
        RuleId::ExistsGoal,
        "Prove an existential statement",
        13,
        true,
        RuleKind::Goal,
    ),
    (
        RuleId::ForallKB,
        "Instantiate a universal assumption",
        14,
        true,
        RuleKind::Kb,
    ),
    (
        RuleId::NotKB,
        "Use a negated assumption",
        14,
        true,
        RuleKind::Kb,
    ),
    (
        RuleId::ImplKB,
        "Use an assumed implication",
        14,
        true,
        RuleKind::Kb,
    ),
    (
        RuleId::ByContradiction,
        "Proof by contradiction",
        15,
        false,
        RuleKind::Goal,
    ),
];

impl RuleId {
    pub const ALL: [RuleId; 19] = {
        let mut ids = [RuleId::GoalTrue; 19];
        let mut i = 0;
        while i < 19 {
            ids[i] = CATALOG[i].0;
            i += 1;
        }
        ids
    };

    /// Position in the catalog; breaks priority ties.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn descriptor(self) -> RuleDescriptor {
        let (id, name, priority, active, kind) = CATALOG[self.index()];
        RuleDescriptor {
            id,
            display_name: name.to_string(),
            default_priority: priority,
            default_active: active,
            kind,
        }
    }

    pub fn display_name(self) -> &'static str {
        CATALOG[self.index()].1
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::GoalTrue => "GoalTrue",
            RuleId::ContradictionInKB => "ContradictionInKB",
            RuleId::GoalInKB => "GoalInKB",
            RuleId::AndGoal => "AndGoal",
            RuleId::ImplGoal => "ImplGoal",
            RuleId::IffGoal => "IffGoal",
            RuleId::NotGoal => "NotGoal",
            RuleId::ForallGoal => "ForallGoal",
            RuleId::AndKB => "AndKB",
            RuleId::IffKB => "IffKB",
            RuleId::ExistsKB => "ExistsKB",
            RuleId::ModusPonensKB => "ModusPonensKB",
            RuleId::OrKB => "OrKB",
            RuleId::OrGoal => "OrGoal",
            RuleId::ExistsGoal => "ExistsGoal",
            RuleId::ForallKB => "ForallKB",
            RuleId::NotKB => "NotKB",
            RuleId::ImplKB => "ImplKB",
            RuleId::ByContradiction => "ByContradiction",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownRule(pub String);

impl fmt::Display for UnknownRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown rule id \"{}\"", self.0)
    }
}

impl std::error::Error for UnknownRule {}

impl FromStr for RuleId {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// The fixed rule catalog in default-priority order.
pub fn rule_catalog() -> Vec<RuleDescriptor> {
    RuleId::ALL.iter().map(|r| r.descriptor()).collect()
}

/// What a rule application acts on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Focus {
    Goal,
    Assumptions(Vec<String>),
}

impl Focus {
    pub fn labels(&self) -> &[String] {
        match self {
            Focus::Goal => &[],
            Focus::Assumptions(labels) => labels,
        }
    }
}

/// Binding key for the term a quantifier is instantiated with.
pub const BIND_TERM: &str = "term";
/// Binding key for a freshly introduced constant.
pub const BIND_CONSTANT: &str = "constant";

/// One way of applying a rule to a situation, together with its result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleApplication {
    pub rule: RuleId,
    pub focus: Focus,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, Term>,
    /// No children closes the branch.
    pub children: Vec<ProofSituation>,
    /// Selects the prose template.
    pub description_key: String,
}

impl RuleApplication {
    pub fn is_closing(&self) -> bool {
        self.children.is_empty()
    }

    pub fn fresh_constant(&self) -> Option<&str> {
        match self.bindings.get(BIND_CONSTANT) {
            Some(Term::Const(c)) => Some(c),
            _ => None,
        }
    }
}
