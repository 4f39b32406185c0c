use std::fmt::Write;

use super::ast::*;

pub fn print_type(t: &Type) -> String {
    t.to_string()
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    term(t, &mut s);
    s
}

fn term(t: &Term, out: &mut String) {
    if let Some(n) = t.as_numeral() {
        write!(out, "{n}").unwrap();
        return;
    }
    let mut form = |head: &str, args: &[&Term]| {
        out.push('(');
        out.push_str(head);
        for a in args {
            out.push(' ');
            term(a, out);
        }
        out.push(')');
    };
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Lam(x, ty, b) => {
            write!(out, "(lam ({x} {ty}) ").unwrap();
            term(b, out);
            out.push(')');
        }
        Term::App(a, b) => form("app", &[a, b]),
        Term::Zero => unreachable!(),
        Term::Succ(a) => form("succ", &[a]),
        Term::Rec(ty, a, b, c) => {
            write!(out, "(rec {ty}").unwrap();
            for x in [a, b, c] {
                out.push(' ');
                term(x, out);
            }
            out.push(')');
        }
        Term::Nil(ty) => write!(out, "(nil {ty})").unwrap(),
        Term::Cons(a, b) => form("cons", &[a, b]),
        Term::Append(a, b) => form("append", &[a, b]),
        Term::Len(a) => form("len", &[a]),
        Term::Idx(a, b) => form("idx", &[a, b]),
        Term::Prefix(a, b) => form("prefix", &[a, b]),
        Term::MaxNat(a) => form("max", &[a]),
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    formula(f, &mut s);
    s
}

fn formula(f: &Formula, out: &mut String) {
    let terms = |head: &str, args: &[&Term], out: &mut String| {
        out.push('(');
        out.push_str(head);
        for a in args {
            out.push(' ');
            term(a, out);
        }
        out.push(')');
    };
    match f {
        Formula::Eq0(a, b) => terms("eq0", &[a, b], out),
        Formula::Le0(a, b) => terms("le0", &[a, b], out),
        Formula::Approx(a, b) => terms("approx", &[a, b], out),
        Formula::St(a) => terms("st", &[a], out),
        Formula::Atom(n, args) => {
            write!(out, "(atom {n}").unwrap();
            for a in args {
                out.push(' ');
                term(a, out);
            }
            out.push(')');
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            let head = match f {
                Formula::And(..) => "and",
                Formula::Or(..) => "or",
                _ => "imp",
            };
            write!(out, "({head} ").unwrap();
            formula(a, out);
            out.push(' ');
            formula(b, out);
            out.push(')');
        }
        Formula::Not(a) => {
            out.push_str("(not ");
            formula(a, out);
            out.push(')');
        }
        Formula::ForallOmega(x, b) | Formula::ForallInf(x, b) => {
            let head = if matches!(f, Formula::ForallOmega(..)) {
                "forall-omega"
            } else {
                "forall-inf"
            };
            write!(out, "({head} ({x}) ").unwrap();
            formula(b, out);
            out.push(')');
        }
        _ => {
            let (q, x, ty, b) = f.as_quant().unwrap();
            let head = match q {
                Quant::Forall => "forall",
                Quant::Exists => "exists",
                Quant::ForallSt => "forall-st",
                Quant::ExistsSt => "exists-st",
            };
            write!(out, "({head} ({x} {ty}) ").unwrap();
            formula(b, out);
            out.push(')');
        }
    }
}

pub fn print_atom_decl(a: &AtomDecl) -> String {
    let mut s = format!("(declare-atom {} (", a.name);
    for (i, t) in a.sorts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{t}").unwrap();
    }
    s.push(')');
    if a.decidable {
        s.push_str(" :decidable");
    }
    if !a.monotone.is_empty() {
        s.push_str(" :monotone");
        for k in &a.monotone {
            write!(s, " {k}").unwrap();
        }
    }
    if !a.antitone.is_empty() {
        s.push_str(" :antitone");
        for k in &a.antitone {
            write!(s, " {k}").unwrap();
        }
    }
    s.push(')');
    s
}

/// Preamble lines, one declaration per line.
pub fn print_signature(sig: &Signature) -> String {
    let mut s = String::new();
    for name in &sig.sorts {
        writeln!(s, "(declare-sort {name})").unwrap();
    }
    for a in &sig.atoms {
        writeln!(s, "{}", print_atom_decl(a)).unwrap();
    }
    for (n, t) in &sig.vars {
        writeln!(s, "(declare-var {n} {t})").unwrap();
    }
    s
}

pub fn print_document(d: &Document) -> String {
    format!("{}{}\n", print_signature(&d.sig), print_formula(&d.formula))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::{parse_document, parse_formula};

    #[test]
    fn atoms_print_canonically() {
        assert_eq!(print_formula(&Formula::St(Term::var("n"))), "(st n)");
        assert_eq!(
            print_formula(&Formula::Approx(Term::var("x"), Term::var("y"))),
            "(approx x y)"
        );
        assert_eq!(print_term(&Term::numeral(3)), "3");
        assert_eq!(print_term(&Term::succ(Term::var("k"))), "(succ k)");
    }

    #[test]
    fn nested_quantifiers_roundtrip() {
        let text = "(declare-sort Real)\n(declare-atom lt (Real Real Nat) :decidable :antitone 2)\n(forall-st (x Real) (forall (y Real) (imp (forall-st (n Nat) (atom lt x y n)) (exists-st (m Nat) (le0 m (len (cons m (nil Nat))))))))\n";
        let d = parse_document(text).unwrap();
        assert_eq!(print_document(&d), text);
        let again = parse_formula(&print_formula(&d.formula), &d.sig).unwrap();
        assert_eq!(again, d.formula);
    }
}
