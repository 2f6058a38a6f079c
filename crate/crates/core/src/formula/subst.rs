use std::collections::BTreeSet;

use super::{Formula, Term};

/// Returns `hint` if it is unused, otherwise `hint0`, `hint1`, ... whichever
/// comes first outside `signature`.
pub fn fresh_constant(signature: &BTreeSet<String>, hint: &str) -> String {
    if !signature.contains(hint) {
        return hint.to_string();
    }
    (0..)
        .map(|i| format!("{hint}{i}"))
        .find(|c| !signature.contains(c))
        .expect("unbounded index")
}

fn renamed_binder(var: &str, avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{var}{i}"))
        .find(|c| !avoid.contains(c))
        .expect("unbounded index")
}

fn formula_names(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom(_, args) => args.iter().for_each(|t| t.collect_names(out)),
        Formula::Top | Formula::Bottom => {}
        Formula::Not(a) => formula_names(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            formula_names(a, out);
            formula_names(b, out);
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            out.insert(v.clone());
            formula_names(body, out);
        }
    }
}

fn subst_term(t: &Term, var: &str, replacement: &Term) -> Term {
    match t {
        Term::Var(v) if v == var => replacement.clone(),
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| subst_term(a, var, replacement))
                .collect(),
        ),
    }
}

/// Capture-avoiding substitution of `t` for the free occurrences of `var`.
///
/// A binder is renamed when its name occurs anywhere in `t`, constants
/// included, so the rendered text of the result parses back to the same tree.
pub fn substitute(f: &Formula, var: &str, t: &Term) -> Formula {
    let mut t_names = BTreeSet::new();
    t.collect_names(&mut t_names);
    subst(f, var, t, &t_names)
}

fn subst(f: &Formula, var: &str, t: &Term, t_names: &BTreeSet<String>) -> Formula {
    match f {
        Formula::Atom(p, args) => Formula::Atom(
            p.clone(),
            args.iter().map(|a| subst_term(a, var, t)).collect(),
        ),
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Not(a) => Formula::not(subst(a, var, t, t_names)),
        Formula::And(a, b) => Formula::and(subst(a, var, t, t_names), subst(b, var, t, t_names)),
        Formula::Or(a, b) => Formula::or(subst(a, var, t, t_names), subst(b, var, t, t_names)),
        Formula::Implies(a, b) => {
            Formula::implies(subst(a, var, t, t_names), subst(b, var, t, t_names))
        }
        Formula::Iff(a, b) => Formula::iff(subst(a, var, t, t_names), subst(b, var, t, t_names)),
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let rebuild = |v: String, body: Formula| {
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            };
            if v == var || !body.free_vars().contains(var) {
                return f.clone();
            }
            if t_names.contains(v) {
                let mut avoid = t_names.clone();
                formula_names(body, &mut avoid);
                avoid.insert(var.to_string());
                let fresh = renamed_binder(v, &avoid);
                let body = subst(
                    body,
                    v,
                    &Term::Var(fresh.clone()),
                    &BTreeSet::from([fresh.clone()]),
                );
                rebuild(fresh, subst(&body, var, t, t_names))
            } else {
                rebuild(v.clone(), subst(body, var, t, t_names))
            }
        }
    }
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(f: &Formula, g: &Formula) -> bool {
    fn term_eq(s: &Term, t: &Term, env_s: &[&str], env_t: &[&str]) -> bool {
        match (s, t) {
            (Term::Var(a), Term::Var(b)) => {
                let ia = env_s.iter().rposition(|v| v == a);
                let ib = env_t.iter().rposition(|v| v == b);
                match (ia, ib) {
                    (Some(i), Some(j)) => env_s.len() - i == env_t.len() - j,
                    (None, None) => a == b,
                    _ => false,
                }
            }
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env_s, env_t))
            }
            _ => false,
        }
    }

    fn go<'a>(
        f: &'a Formula,
        g: &'a Formula,
        env_f: &mut Vec<&'a str>,
        env_g: &mut Vec<&'a str>,
    ) -> bool {
        match (f, g) {
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                p == q
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env_f, env_g))
            }
            (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
            (Formula::Not(a), Formula::Not(b)) => go(a, b, env_f, env_g),
            (Formula::And(a1, b1), Formula::And(a2, b2))
            | (Formula::Or(a1, b1), Formula::Or(a2, b2))
            | (Formula::Implies(a1, b1), Formula::Implies(a2, b2))
            | (Formula::Iff(a1, b1), Formula::Iff(a2, b2)) => {
                go(a1, a2, env_f, env_g) && go(b1, b2, env_f, env_g)
            }
            (Formula::Forall(v, a), Formula::Forall(w, b))
            | (Formula::Exists(v, a), Formula::Exists(w, b)) => {
                env_f.push(v);
                env_g.push(w);
                let eq = go(a, b, env_f, env_g);
                env_f.pop();
                env_g.pop();
                eq
            }
            _ => false,
        }
    }

    go(f, g, &mut Vec::new(), &mut Vec::new())
}

/// A string that is identical for two formulas iff they are alpha-equal.
///
/// Bound variables are replaced by their de Bruijn index.
pub fn canonical_key(f: &Formula) -> String {
    fn term(t: &Term, env: &[&str], out: &mut String) {
        match t {
            Term::Var(v) => match env.iter().rposition(|b| b == v) {
                Some(i) => {
                    out.push('#');
                    out.push_str(&(env.len() - i).to_string());
                }
                None => {
                    out.push('?');
                    out.push_str(v);
                }
            },
            Term::Const(c) => out.push_str(c),
            Term::App(f, args) => {
                out.push_str(f);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    term(a, env, out);
                }
                out.push(')');
            }
        }
    }

    fn go<'a>(f: &'a Formula, env: &mut Vec<&'a str>, out: &mut String) {
        let bin = |tag: &str,
                   a: &'a Formula,
                   b: &'a Formula,
                   env: &mut Vec<&'a str>,
                   out: &mut String| {
            out.push_str(tag);
            out.push('(');
            go(a, env, out);
            out.push(',');
            go(b, env, out);
            out.push(')');
        };
        match f {
            Formula::Atom(p, args) => {
                out.push_str(p);
                out.push('[');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    term(a, env, out);
                }
                out.push(']');
            }
            Formula::Top => out.push('T'),
            Formula::Bottom => out.push('F'),
            Formula::Not(a) => {
                out.push('~');
                go(a, env, out);
            }
            Formula::And(a, b) => bin("&", a, b, env, out),
            Formula::Or(a, b) => bin("|", a, b, env, out),
            Formula::Implies(a, b) => bin(">", a, b, env, out),
            Formula::Iff(a, b) => bin("=", a, b, env, out),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                out.push(if matches!(f, Formula::Forall(..)) {
                    'A'
                } else {
                    'E'
                });
                env.push(v);
                go(a, env, out);
                env.pop();
            }
        }
    }

    let mut out = String::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// If `instance` equals `body[var := t]` for some ground term `t`, returns it.
///
/// Returns `Some(None)` when `var` does not occur free in `body` and the two
/// are alpha-equal.
pub fn match_instance(body: &Formula, var: &str, instance: &Formula) -> Option<Option<Term>> {
    fn term(p: &Term, t: &Term, var: &str, env: &[(&str, &str)], bind: &mut Option<Term>) -> bool {
        match (p, t) {
            (Term::Var(a), _) if a == var && !env.iter().any(|(x, _)| x == a) => {
                if !t.is_ground() {
                    return false;
                }
                match bind {
                    Some(b) => b == t,
                    None => {
                        *bind = Some(t.clone());
                        true
                    }
                }
            }
            (Term::Var(a), Term::Var(b)) => {
                let ia = env.iter().rposition(|(x, _)| x == a);
                let ib = env.iter().rposition(|(_, y)| y == b);
                match (ia, ib) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => a == b,
                    _ => false,
                }
            }
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| term(x, y, var, env, bind))
            }
            _ => false,
        }
    }

    fn go<'a>(
        p: &'a Formula,
        f: &'a Formula,
        var: &str,
        env: &mut Vec<(&'a str, &'a str)>,
        bind: &mut Option<Term>,
    ) -> bool {
        match (p, f) {
            (Formula::Atom(a, xs), Formula::Atom(b, ys)) => {
                a == b
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| term(x, y, var, env, bind))
            }
            (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
            (Formula::Not(a), Formula::Not(b)) => go(a, b, var, env, bind),
            (Formula::And(a1, b1), Formula::And(a2, b2))
            | (Formula::Or(a1, b1), Formula::Or(a2, b2))
            | (Formula::Implies(a1, b1), Formula::Implies(a2, b2))
            | (Formula::Iff(a1, b1), Formula::Iff(a2, b2)) => {
                go(a1, a2, var, env, bind) && go(b1, b2, var, env, bind)
            }
            (Formula::Forall(v, a), Formula::Forall(w, b))
            | (Formula::Exists(v, a), Formula::Exists(w, b)) => {
                if v == var {
                    // `var` is shadowed below this binder.
                    return alpha_eq(p, f);
                }
                env.push((v, w));
                let ok = go(a, b, var, env, bind);
                env.pop();
                ok
            }
            _ => false,
        }
    }

    let mut bind = None;
    go(body, instance, var, &mut Vec::new(), &mut bind).then_some(bind)
}
