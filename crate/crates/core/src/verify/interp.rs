//! Finite interpretations: carriers, cutoff, atom tables and rules.
//!
//! Line-oriented file format, `;` starts a comment:
//!
//! ```text
//! sort Real 17 unit          ; elements i/16 for i = 0..16
//! sort Event 8               ; elements 0..7
//! cutoff K=1 M=8             ; Nat carrier {0..M}, st(n) iff n <= K
//! fun f rule (* x0 x0)       ; declared parameter f
//! atom lt-inv-dist rule (< (abs (- x0 x1)) (/ 1 x2))
//! atom phi table 0110        ; lexicographic over the argument carriers
//! carrier (-> Nat Nat) (lam (n Nat) n) (lam (n Nat) 0)
//! mu-grid first-zero 0 32    ; test functions for the mu specification
//! mu-grid never
//! mu-horizon 64
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::syntax::ast::{Signature, Term, Type};
use crate::syntax::parse::{parse_term_sexp, parse_type_sexp};
use crate::syntax::sexp::{read_all, Sexp};
use crate::syntax::typing::{infer_type, Ctx};

use super::rational::{parse_rexpr, RExpr, RVal};
use super::VerifyError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortCarrier {
    pub size: usize,
    /// Element `i` denotes `i/(size-1)` instead of `i`.
    pub unit: bool,
}

impl SortCarrier {
    pub fn value(&self, i: u64) -> BigRational {
        let i = BigInt::from(i);
        if self.unit && self.size > 1 {
            BigRational::new(i, BigInt::from(self.size - 1))
        } else {
            BigRational::from_integer(i)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomInterp {
    Rule(RExpr),
    Table(Vec<bool>),
}

#[derive(Clone, Debug, Default)]
pub struct Interpretation {
    pub sorts: BTreeMap<String, SortCarrier>,
    /// Standard cutoff; only the schema checker reads it.
    pub k: u64,
    /// Nat carrier is `{0..m}`.
    pub m: u64,
    pub funs: BTreeMap<String, RExpr>,
    pub atoms: BTreeMap<String, AtomInterp>,
    /// Explicit elements for higher types.
    pub carriers: Vec<(Type, Vec<Term>)>,
    pub mu_grid: Vec<Term>,
    pub mu_horizon: u64,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, VerifyError> {
    Err(VerifyError::Interp(format!("line {line}: {}", msg.into())))
}

/// `lam n. (j - n) > 0 ? 1 : 0`, whose first zero is at `j`.
pub fn first_zero_at(j: u64) -> Term {
    // j - n by iterated predecessor, then sign
    let pred = |t: Term| {
        Term::Rec(
            Type::Nat,
            Box::new(Term::Zero),
            Box::new(Term::lam(
                "k",
                Type::Nat,
                Term::lam("r", Type::Nat, Term::var("k")),
            )),
            Box::new(t),
        )
    };
    let monus = Term::Rec(
        Type::Nat,
        Box::new(Term::numeral(j)),
        Box::new(Term::lam(
            "i",
            Type::Nat,
            Term::lam("acc", Type::Nat, pred(Term::var("acc"))),
        )),
        Box::new(Term::var("n")),
    );
    let sign = Term::Rec(
        Type::Nat,
        Box::new(Term::Zero),
        Box::new(Term::lam(
            "u",
            Type::Nat,
            Term::lam("v", Type::Nat, Term::numeral(1)),
        )),
        Box::new(monus),
    );
    Term::lam("n", Type::Nat, sign)
}

pub fn never_zero() -> Term {
    Term::lam("n", Type::Nat, Term::numeral(1))
}

impl Interpretation {
    pub fn parse(text: &str, sig: &Signature) -> Result<Interpretation, VerifyError> {
        let mut out = Interpretation {
            m: 8,
            mu_horizon: 64,
            ..Default::default()
        };
        for (n, raw) in text.lines().enumerate() {
            let ln = n + 1;
            let line = raw.split(';').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let xs = read_all(line).map_err(|e| VerifyError::Interp(format!("line {ln}: {e}")))?;
            let word = |i: usize| xs.get(i).and_then(Sexp::as_atom);
            match word(0) {
                Some("sort") => {
                    let (Some(name), Some(size)) = (word(1), word(2).and_then(|s| s.parse().ok()))
                    else {
                        return err(ln, "expected `sort <name> <size> [unit]`");
                    };
                    if !sig.has_sort(name) {
                        return err(ln, format!("sort `{name}` is not declared"));
                    }
                    let unit = match word(3) {
                        None => false,
                        Some("unit") => true,
                        Some(o) => return err(ln, format!("unknown sort option `{o}`")),
                    };
                    out.sorts.insert(name.into(), SortCarrier { size, unit });
                }
                Some("cutoff") => {
                    for x in &xs[1..] {
                        let s = x.as_atom().unwrap_or("");
                        let parsed = s
                            .split_once('=')
                            .and_then(|(k, v)| Some((k, v.parse().ok()?)));
                        match parsed {
                            Some(("K", v)) => out.k = v,
                            Some(("M", v)) => out.m = v,
                            _ => return err(ln, format!("bad cutoff field `{s}`")),
                        }
                    }
                }
                Some(kind @ ("fun" | "atom")) => {
                    let Some(name) = word(1) else {
                        return err(ln, format!("{kind} needs a name"));
                    };
                    let body = match (word(2), xs.get(3)) {
                        (Some("rule"), Some(e)) if xs.len() == 4 => AtomInterp::Rule(
                            parse_rexpr(e)
                                .map_err(|m| VerifyError::Interp(format!("line {ln}: {m}")))?,
                        ),
                        (Some("table"), Some(Sexp::Atom(bits, _))) if kind == "atom" => {
                            let mut v = Vec::new();
                            for c in bits.chars() {
                                match c {
                                    '0' => v.push(false),
                                    '1' => v.push(true),
                                    _ => return err(ln, "table must be a bitstring"),
                                }
                            }
                            AtomInterp::Table(v)
                        }
                        _ => return err(ln, format!("expected `{kind} <name> rule <expr>`")),
                    };
                    if kind == "fun" {
                        if sig.var(name).is_none() {
                            return err(ln, format!("`{name}` is not a declared parameter"));
                        }
                        let AtomInterp::Rule(r) = body else {
                            unreachable!()
                        };
                        out.funs.insert(name.into(), r);
                    } else {
                        let Some(decl) = sig.atom(name) else {
                            return err(ln, format!("atom `{name}` is not declared"));
                        };
                        if let AtomInterp::Rule(r) = &body {
                            if r.arity() > decl.sorts.len() {
                                return err(
                                    ln,
                                    format!("rule for `{name}` uses too many arguments"),
                                );
                            }
                        }
                        out.atoms.insert(name.into(), body);
                    }
                }
                Some("carrier") if xs.len() >= 2 => {
                    let ty = parse_type_sexp(&xs[1], sig)
                        .map_err(|e| VerifyError::Interp(format!("line {ln}: {e}")))?;
                    let mut terms = Vec::new();
                    for x in &xs[2..] {
                        let t = parse_term_sexp(x, sig)
                            .map_err(|e| VerifyError::Interp(format!("line {ln}: {e}")))?;
                        match infer_type(&t, &Ctx::new()) {
                            Ok(got) if got == ty => terms.push(t),
                            Ok(got) => {
                                return err(
                                    ln,
                                    format!("carrier element has type {got}, expected {ty}"),
                                )
                            }
                            Err(e) => return err(ln, e.to_string()),
                        }
                    }
                    match out.carriers.iter_mut().find(|(t, _)| *t == ty) {
                        Some((_, v)) => v.extend(terms),
                        None => out.carriers.push((ty, terms)),
                    }
                }
                Some("mu-grid") => match (word(1), word(2), word(3)) {
                    (Some("first-zero"), Some(a), Some(b)) => {
                        let (Ok(a), Ok(b)) = (a.parse::<u64>(), b.parse::<u64>()) else {
                            return err(ln, "expected `mu-grid first-zero <lo> <hi>`");
                        };
                        out.mu_grid.extend((a..=b).map(first_zero_at));
                    }
                    (Some("never"), None, None) => out.mu_grid.push(never_zero()),
                    _ => {
                        return err(
                            ln,
                            "expected `mu-grid first-zero <lo> <hi>` or `mu-grid never`",
                        )
                    }
                },
                Some("mu-horizon") => match word(1).and_then(|s| s.parse().ok()) {
                    Some(h) => out.mu_horizon = h,
                    None => return err(ln, "expected `mu-horizon <n>`"),
                },
                _ => return err(ln, format!("unknown directive: {line}")),
            }
        }
        for (name, a) in &out.atoms {
            if let AtomInterp::Table(bits) = a {
                let decl = sig.atom(name).unwrap();
                let want = decl
                    .sorts
                    .iter()
                    .map(|t| out.carrier_size(t))
                    .collect::<Result<Vec<_>, _>>()?
                    .iter()
                    .product::<usize>();
                if bits.len() != want {
                    return Err(VerifyError::Interp(format!(
                        "table for `{name}` has {} bits, expected {want}",
                        bits.len()
                    )));
                }
            }
        }
        Ok(out)
    }

    pub fn carrier_size(&self, t: &Type) -> Result<usize, VerifyError> {
        match t {
            Type::Nat => Ok(self.m as usize + 1),
            Type::Sort(s) => self
                .sorts
                .get(s)
                .map(|c| c.size)
                .ok_or_else(|| VerifyError::NoCarrier(t.to_string())),
            _ => self
                .carriers
                .iter()
                .find(|(c, _)| c == t)
                .map(|(_, v)| v.len())
                .ok_or_else(|| VerifyError::NoCarrier(t.to_string())),
        }
    }

    /// Rational reading of a base-type element given as an index.
    pub fn base_value(&self, t: &Type, i: u64) -> Result<RVal, VerifyError> {
        match t {
            Type::Nat => Ok(RVal::Q(BigRational::from_integer(BigInt::from(i)))),
            Type::Sort(s) => self
                .sorts
                .get(s)
                .map(|c| RVal::Q(c.value(i)))
                .ok_or_else(|| VerifyError::NoCarrier(t.to_string())),
            _ => Err(VerifyError::NoCarrier(t.to_string())),
        }
    }

    /// Printed form of an element: its rational value for sorts.
    pub fn show_base(&self, t: &Type, i: u64) -> String {
        match self.base_value(t, i) {
            Ok(v) => v.to_string(),
            Err(_) => i.to_string(),
        }
    }
}
