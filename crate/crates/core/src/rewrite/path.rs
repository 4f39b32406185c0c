//! Positions inside formulas: child indices from the root.

use std::fmt;

use crate::syntax::ast::{Formula, Type};
use crate::syntax::sexp::Sexp;

pub type Path = Vec<usize>;

/// Printable path: `root` or dotted child indices such as `0.1.2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDisplay(pub Path);

impl fmt::Display for PathDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

pub fn parse_path_text(s: &str) -> Option<Path> {
    if s == "root" {
        return Some(vec![]);
    }
    s.split('.').map(|p| p.parse().ok()).collect()
}

/// Paths in scripts: `root`, `()`, `(0 1 2)` or a bare index.
pub fn parse_path_sexp(x: &Sexp) -> Option<Path> {
    match x {
        Sexp::Atom(s, _) => parse_path_text(s),
        Sexp::List(items, _) => items
            .iter()
            .map(|i| i.as_atom().and_then(|a| a.parse().ok()))
            .collect(),
        Sexp::Str(..) => None,
    }
}

pub fn get_at<'a>(f: &'a Formula, path: &[usize]) -> Option<&'a Formula> {
    let mut cur = f;
    for &i in path {
        cur = *cur.children().get(i)?;
    }
    Some(cur)
}

fn child_mut(f: &mut Formula, i: usize) -> Option<&mut Formula> {
    match (f, i) {
        (Formula::And(a, _) | Formula::Or(a, _) | Formula::Imp(a, _), 0) => Some(a),
        (Formula::And(_, b) | Formula::Or(_, b) | Formula::Imp(_, b), 1) => Some(b),
        (
            Formula::Not(a)
            | Formula::Forall(_, _, a)
            | Formula::Exists(_, _, a)
            | Formula::ForallSt(_, _, a)
            | Formula::ExistsSt(_, _, a)
            | Formula::ForallOmega(_, a)
            | Formula::ForallInf(_, a),
            0,
        ) => Some(a),
        _ => None,
    }
}

/// Replaces the subformula at `path`; `None` if the path is invalid.
pub fn replace_at(f: &Formula, path: &[usize], new: Formula) -> Option<Formula> {
    let mut out = f.clone();
    let mut cur = &mut out;
    for &i in path {
        cur = child_mut(cur, i)?;
    }
    *cur = new;
    Some(out)
}

/// True at positive (even) polarity. Antecedents and negations flip.
pub fn polarity_at(f: &Formula, path: &[usize]) -> Option<bool> {
    let mut pos = true;
    let mut cur = f;
    for &i in path {
        match cur {
            Formula::Not(_) => pos = !pos,
            Formula::Imp(..) if i == 0 => pos = !pos,
            _ => {}
        }
        cur = *cur.children().get(i)?;
    }
    Some(pos)
}

/// Binders (with types) in scope at `path`, outermost first.
/// `ForallOmega` binds a `Nat`; `ForallInf` binders are reported with `None`.
pub fn binders_at(f: &Formula, path: &[usize]) -> Option<Vec<(String, Option<Type>)>> {
    let mut out = Vec::new();
    let mut cur = f;
    for &i in path {
        match cur {
            Formula::ForallOmega(x, _) => out.push((x.clone(), Some(Type::Nat))),
            Formula::ForallInf(x, _) => out.push((x.clone(), None)),
            _ => {
                if let Some((_, x, ty, _)) = cur.as_quant() {
                    out.push((x.to_string(), Some(ty.clone())));
                }
            }
        }
        cur = *cur.children().get(i)?;
    }
    Some(out)
}

/// All paths in pre-order (parents before children, left to right).
pub fn all_paths(f: &Formula) -> Vec<Path> {
    let mut out = Vec::new();
    fn go(f: &Formula, cur: &mut Path, out: &mut Vec<Path>) {
        out.push(cur.clone());
        for (i, c) in f.children().into_iter().enumerate() {
            cur.push(i);
            go(c, cur, out);
            cur.pop();
        }
    }
    go(f, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ast::Term;

    #[test]
    fn navigation() {
        let p = Formula::atom("p", vec![Term::var("x")]);
        let f = Formula::imp(Formula::not(p.clone()), p.clone());
        assert_eq!(get_at(&f, &[0, 0]), Some(&p));
        assert_eq!(polarity_at(&f, &[0, 0]), Some(true));
        assert_eq!(polarity_at(&f, &[0]), Some(false));
        let g = replace_at(&f, &[1], Formula::Eq0(Term::Zero, Term::Zero)).unwrap();
        assert_eq!(
            get_at(&g, &[1]),
            Some(&Formula::Eq0(Term::Zero, Term::Zero))
        );
        assert!(replace_at(&f, &[2], p).is_none());
        assert_eq!(all_paths(&f).len(), 4);
    }

    #[test]
    fn path_text() {
        assert_eq!(PathDisplay(vec![]).to_string(), "root");
        assert_eq!(PathDisplay(vec![0, 1, 2]).to_string(), "0.1.2");
        assert_eq!(parse_path_text("0.1.2"), Some(vec![0, 1, 2]));
        assert_eq!(parse_path_text("root"), Some(vec![]));
    }
}
