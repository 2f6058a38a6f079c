//! Run every bundled problem and print one line each.
//!
//!     cargo run --release -p prooftutor --example corpus -- ground-

use std::time::Instant;

use prooftutor::corpus::Corpus;
use prooftutor::search::{prove, CancelToken, ProverConfig};

fn main() {
    let prefix = std::env::args().nth(1).unwrap_or_default();
    let corpus = Corpus::bundled();
    let config = ProverConfig::default().with_time_limit_ms(2_000);
    let mut proved = 0;
    let problems: Vec<_> = corpus.problems_named(&prefix).filter(|p| !p.stress).collect();
    for p in &problems {
        let (goal, kb) = corpus.instance(p).expect("problem resolves");
        let start = Instant::now();
        let r = prove(&goal, &kb, &config, &CancelToken::new());
        proved += r.is_proved() as usize;
        println!("{:<14} {:<12?} {:>7} nodes {:>8.1} ms  {goal}", p.name, r.outcome, r.tree.len(), start.elapsed().as_secs_f64() * 1e3);
    }
    println!("{proved}/{} proved", problems.len());
}
