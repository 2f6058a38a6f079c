use super::{Formula, Term, EQUALITY};

// Binding strength, loosest first. Quantifiers are prefix operators whose
// scope runs to the end of the enclosing group, so they only ever need
// parentheses when something follows them.
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const PREFIX: u8 = 5;

pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(n) | Term::Const(n) => out.push_str(n),
        Term::App(f, args) => {
            out.push_str(f);
            write_args(args, out);
        }
    }
}

fn write_args(args: &[Term], out: &mut String) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_term(a, out);
    }
    out.push(')');
}

/// Renders `f` with the fewest parentheses that still parse back to `f`.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, 0, true, &mut out);
    out
}

fn binary(f: &Formula) -> Option<(&Formula, &Formula, u8, &'static str, bool)> {
    // (lhs, rhs, strength, operator, left associative)
    match f {
        Formula::And(a, b) => Some((a, b, AND, " & ", true)),
        Formula::Or(a, b) => Some((a, b, OR, " | ", true)),
        Formula::Implies(a, b) => Some((a, b, IMPLIES, " -> ", false)),
        Formula::Iff(a, b) => Some((a, b, IFF, " <-> ", false)),
        _ => None,
    }
}

/// `min` is the weakest operator allowed at this position without parentheses;
/// `last` says whether nothing follows this subformula inside its group.
fn write_formula(f: &Formula, min: u8, last: bool, out: &mut String) {
    if let Some((lhs, rhs, strength, op, left_assoc)) = binary(f) {
        let parens = strength < min;
        let last = last || parens;
        if parens {
            out.push('(');
        }
        let (lmin, rmin) = if left_assoc {
            (strength, strength + 1)
        } else {
            (strength + 1, strength)
        };
        write_formula(lhs, lmin, false, out);
        out.push_str(op);
        write_formula(rhs, rmin, last, out);
        if parens {
            out.push(')');
        }
        return;
    }
    match f {
        Formula::Atom(p, args) if p == EQUALITY && args.len() == 2 => {
            write_term(&args[0], out);
            out.push_str(" = ");
            write_term(&args[1], out);
        }
        Formula::Atom(p, args) => {
            out.push_str(p);
            if !args.is_empty() {
                write_args(args, out);
            }
        }
        Formula::Top => out.push_str("true"),
        Formula::Bottom => out.push_str("false"),
        Formula::Not(inner) => {
            out.push('!');
            write_formula(inner, PREFIX, last, out);
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            if !last {
                out.push('(');
            }
            out.push_str(if matches!(f, Formula::Forall(..)) {
                "forall "
            } else {
                "exists "
            });
            out.push_str(v);
            out.push_str(". ");
            write_formula(body, 0, true, out);
            if !last {
                out.push(')');
            }
        }
        _ => unreachable!("binary connectives handled above"),
    }
}
