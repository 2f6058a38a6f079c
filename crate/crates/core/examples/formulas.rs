//! Parse, print and substitute.
//!
//!     cargo run -p prooftutor --example formulas -- "forall x. exists y. R(x, y)"

use prooftutor::formula::{alpha_eq, canonical_key, parse_formula, render_formula, substitute, Formula, Term};

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| "forall x. (P(x) -> exists y. R(x, y)) & !Q(a)".into());
    let f = match parse_formula(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    println!("parsed:     {}", render_formula(&f));
    println!("depth {}, {} connectives, constants {:?}, predicates {:?}", f.depth(), f.connective_count(), f.constants(), f.predicates());
    println!("canonical:  {}", canonical_key(&f));

    let renamed = parse_formula("forall z. (P(z) -> exists w. R(z, w)) & !Q(a)").unwrap();
    println!("alpha-equal to the renamed version: {}", alpha_eq(&f, &renamed));

    // Instantiating with a term that mentions y renames the inner binder.
    if let Formula::Forall(var, body) = &f {
        let instance = substitute(body, var, &Term::app("f", vec![Term::var("y")]));
        println!("{var} := f(y): {}", render_formula(&instance));
    }
}
