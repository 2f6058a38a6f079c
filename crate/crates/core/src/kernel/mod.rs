//! Proof situations, the inference-rule catalog and the step checker.

mod apply;
mod check;
mod rules;
mod situation;

pub use apply::{applicable_applications, applications_of, apply, term_pool, InvalidApplication};
pub use check::{check_step, StepVerdict};
pub use rules::{
    rule_catalog, Focus, RuleApplication, RuleDescriptor, RuleId, RuleKind, UnknownRule,
    BIND_CONSTANT, BIND_TERM,
};
pub use situation::{Assumption, ProofSituation, SituationError};
