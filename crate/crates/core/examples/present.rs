//! Simplify a proof and export it as text, HTML and JSON.
//!
//!     cargo run -p prooftutor --example present -- socrates html

use prooftutor::corpus::Corpus;
use prooftutor::present::{export_proof, render_proof_nl, ExportFormat};
use prooftutor::search::{prove, simplify, CancelToken, ProverConfig, SimplifyOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "socrates".into());
    let format: ExportFormat = args.next().unwrap_or_else(|| "text".into()).parse().expect("text, html or json");

    let corpus = Corpus::bundled();
    let problem = corpus.problem(&name).unwrap_or_else(|| panic!("no problem {name}"));
    let (goal, kb) = corpus.instance(problem).expect("problem resolves");
    let result = prove(&goal, &kb, &ProverConfig::default(), &CancelToken::new());
    let simple = match simplify(&result.tree, SimplifyOptions::default()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{name}: {e}");
            std::process::exit(1);
        }
    };
    eprintln!("{} nodes in the search tree, {} in the proof", result.tree.len(), simple.len());

    let prose = render_proof_nl(&simple, &kb).expect("simplified");
    eprintln!("{} prose anchors {:?}", prose.title().trim_end_matches(':'), prose.anchors());
    let bytes = export_proof(&simple, &kb, format).expect("export");
    print!("{}", String::from_utf8_lossy(&bytes));
}
