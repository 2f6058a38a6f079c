//! Load a document, show its outline and build a knowledge base from a selection.
//!
//!     cargo run -p prooftutor --example documents -- path/to/doc.tmadoc.json

use std::collections::BTreeSet;

use prooftutor::corpus::Corpus;
use prooftutor::document::{build_knowledge_base, load_document, outline, Document, FormulaRef, OutlineNode};

fn print_outline(nodes: &[OutlineNode], depth: usize) {
    let pad = "  ".repeat(depth);
    for node in nodes {
        match node {
            OutlineNode::Section { title, children } => {
                println!("{pad}# {title}");
                print_outline(children, depth + 1);
            }
            OutlineNode::Env { kind, name, formulas } => {
                println!("{pad}{kind:?} {name}");
                for f in formulas {
                    println!("{pad}  {name}.{}: {}", f.label, f.formula);
                }
            }
        }
    }
}

fn main() {
    let doc: Document = match std::env::args().nth(1) {
        Some(path) => load_document(std::fs::File::open(&path).expect("open document")).expect("valid document"),
        None => Corpus::bundled().document("intro").expect("bundled intro").clone(),
    };
    println!("{} ({})", doc.title, doc.id);
    print_outline(&outline(&doc), 1);

    // Every formula except the last one.
    let mut refs = doc.formula_refs();
    let goal: Option<FormulaRef> = refs.pop();
    let selection: BTreeSet<_> = refs.into_iter().collect();
    let kb = build_knowledge_base(std::slice::from_ref(&doc), &selection).expect("selection resolves");
    println!("\nknowledge base for {}:", goal.map_or("-".into(), |g| g.display_label()));
    for e in &kb.entries {
        println!("  {}  {}", e.display_label, e.formula);
    }
}
