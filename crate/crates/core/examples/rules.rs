//! The rule catalog, switching rules off and changing priorities.
//!
//!     cargo run -p prooftutor --example rules

use prooftutor::document::KnowledgeBase;
use prooftutor::formula::parse_formula;
use prooftutor::kernel::{rule_catalog, RuleId};
use prooftutor::search::{prove, CancelToken, ProverConfig};

fn main() {
    for d in rule_catalog() {
        println!("{:>2} {:<18} {:<8} {:?} {}", d.default_priority, d.id.as_str(), if d.default_active { "on" } else { "off" }, d.kind, d.display_name);
    }

    let kb = KnowledgeBase::default();
    let run = |goal: &str, config: &ProverConfig| prove(&parse_formula(goal).unwrap(), &kb, config, &CancelToken::new()).outcome;

    let identity = "P -> P";
    let without = ProverConfig::default().with_rule(RuleId::ImplGoal, false);
    println!("\n{identity}: defaults {:?}, ImplGoal off {:?}", run(identity, &ProverConfig::default()), run(identity, &without));

    let peirce = "((P -> Q) -> P) -> P";
    let classical = ProverConfig::default().with_rule(RuleId::ByContradiction, true);
    println!("{peirce}: defaults {:?}, ByContradiction on {:?}", run(peirce, &ProverConfig::default()), run(peirce, &classical));

    // Configs round-trip through JSON, the same format the CLI and the service read.
    let tuned = classical.with_priority(RuleId::ByContradiction, 1).with_depth_limit(12);
    let json = tuned.to_json();
    println!("\n{json}");
    assert_eq!(ProverConfig::from_json(&json).unwrap(), tuned);
}
