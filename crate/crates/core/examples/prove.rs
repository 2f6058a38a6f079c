//! Prove a goal from assumptions given on the command line.
//!
//!     cargo run -p prooftutor --example prove -- "exists x. P(x)" "forall x. P(x)" "Q(a)"

use prooftutor::document::KnowledgeBase;
use prooftutor::formula::{parse_formula, Formula};
use prooftutor::search::{prove, CancelToken, NodeStatus, ProverConfig};

fn parse(text: &str) -> Formula {
    parse_formula(text).unwrap_or_else(|e| {
        eprintln!("{text}: {e}");
        std::process::exit(2);
    })
}

fn main() {
    let mut args = std::env::args().skip(1);
    let goal = parse(&args.next().unwrap_or_else(|| "(forall x. P(x) -> Q(x)) -> (forall x. P(x)) -> forall x. Q(x)".into()));
    let labels: Vec<String> = (1..).map(|i| format!("H.{i}")).take(16).collect();
    let formulas: Vec<Formula> = args.map(|a| parse(&a)).collect();
    let kb = KnowledgeBase::from_formulas(labels.iter().map(String::as_str).zip(formulas));

    let config = ProverConfig::default().with_time_limit_ms(5_000);
    let result = prove(&goal, &kb, &config, &CancelToken::new());
    println!("{goal}: {:?} after {} expansions in {} ms", result.outcome, result.stats.nodes_expanded, result.stats.elapsed_ms);

    // The search tree keeps failed and untried alternatives next to the winning one.
    let mut counts = std::collections::BTreeMap::new();
    for s in result.tree.situations() {
        *counts.entry(format!("{:?}", s.status)).or_insert(0) += 1;
    }
    println!("{} nodes; situations by status {counts:?}", result.tree.len());
    for (s, a) in result.tree.steps().filter(|(_, a)| a.status == NodeStatus::Success).take(12) {
        println!("  {:indent$}{} by {}", "", s.situation.goal, a.application.rule.display_name(), indent = 2 * (s.depth as usize - 1));
    }
}
