use super::alpha::rename_apart;
use super::ast::*;
use super::sexp::{read_all, Pos, Sexp, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown atom `{name}` at {pos} (no declaration in the preamble)")]
    UnknownAtom { name: String, pos: Pos },
}

type R<T> = Result<T, ParseError>;

/// Numerals are unary `succ` chains, so literals are capped to keep trees shallow.
pub const MAX_NUMERAL: u64 = 4096;

fn err<T>(pos: Pos, msg: impl Into<String>) -> R<T> {
    Err(ParseError::Syntax(SyntaxError::new(pos, msg)))
}

fn ident(x: &Sexp) -> R<String> {
    match x {
        Sexp::Atom(s, p) => {
            if s.chars().all(|c| c.is_ascii_digit()) || s.starts_with(':') {
                err(*p, format!("expected identifier, found `{s}`"))
            } else {
                Ok(s.clone())
            }
        }
        _ => err(x.pos(), format!("expected identifier, found `{x}`")),
    }
}

fn expect_len(xs: &[Sexp], n: usize, pos: Pos, what: &str) -> R<()> {
    if xs.len() != n {
        return err(pos, format!("`{what}` expects {} argument(s)", n - 1));
    }
    Ok(())
}

pub fn parse_type_sexp(x: &Sexp, sig: &Signature) -> R<Type> {
    match x {
        Sexp::Atom(s, p) => {
            if s == "Nat" {
                Ok(Type::Nat)
            } else if sig.has_sort(s) {
                Ok(Type::Sort(s.clone()))
            } else {
                err(*p, format!("unknown type `{s}`"))
            }
        }
        Sexp::List(xs, p) => match x.head() {
            Some("->") if xs.len() >= 3 => {
                let parts = xs[1..]
                    .iter()
                    .map(|y| parse_type_sexp(y, sig))
                    .collect::<R<Vec<_>>>()?;
                let (last, init) = parts.split_last().unwrap();
                Ok(Type::curried(init, last.clone()))
            }
            Some("Seq") => {
                expect_len(xs, 2, *p, "Seq")?;
                Ok(Type::seq(parse_type_sexp(&xs[1], sig)?))
            }
            _ => err(*p, format!("malformed type `{x}`")),
        },
        Sexp::Str(_, p) => err(*p, "unexpected string in type"),
    }
}

/// `(x T)` binder with explicit type.
fn typed_binder(x: &Sexp, sig: &Signature) -> R<(String, Type)> {
    match x.as_list() {
        Some([name, ty]) => Ok((ident(name)?, parse_type_sexp(ty, sig)?)),
        _ => err(
            x.pos(),
            format!("expected binder `(name Type)`, found `{x}`"),
        ),
    }
}

/// `(x)` binder without type.
fn bare_binder(x: &Sexp) -> R<String> {
    match x.as_list() {
        Some([name]) => ident(name),
        _ => err(x.pos(), format!("expected binder `(name)`, found `{x}`")),
    }
}

pub fn parse_term_sexp(x: &Sexp, sig: &Signature) -> R<Term> {
    let t = |y: &Sexp| parse_term_sexp(y, sig).map(Box::new);
    match x {
        Sexp::Atom(s, p) => {
            if s.chars().all(|c| c.is_ascii_digit()) {
                match s.parse::<u64>() {
                    Ok(n) if n <= MAX_NUMERAL => Ok(Term::numeral(n)),
                    _ => err(*p, format!("numeral `{s}` out of range")),
                }
            } else {
                Ok(Term::Var(ident(x)?))
            }
        }
        Sexp::Str(_, p) => err(*p, "unexpected string in term"),
        Sexp::List(xs, p) => {
            let p = *p;
            let Some(head) = x.head() else {
                return err(p, format!("malformed term `{x}`"));
            };
            match head {
                "lam" => {
                    expect_len(xs, 3, p, "lam")?;
                    let (v, ty) = typed_binder(&xs[1], sig)?;
                    Ok(Term::Lam(v, ty, t(&xs[2])?))
                }
                "app" => {
                    if xs.len() < 3 {
                        return err(p, "`app` expects at least 2 arguments");
                    }
                    let mut acc = parse_term_sexp(&xs[1], sig)?;
                    for a in &xs[2..] {
                        acc = Term::app(acc, parse_term_sexp(a, sig)?);
                    }
                    Ok(acc)
                }
                "succ" => {
                    expect_len(xs, 2, p, "succ")?;
                    Ok(Term::Succ(t(&xs[1])?))
                }
                "rec" => {
                    expect_len(xs, 5, p, "rec")?;
                    Ok(Term::Rec(
                        parse_type_sexp(&xs[1], sig)?,
                        t(&xs[2])?,
                        t(&xs[3])?,
                        t(&xs[4])?,
                    ))
                }
                "nil" => {
                    expect_len(xs, 2, p, "nil")?;
                    Ok(Term::Nil(parse_type_sexp(&xs[1], sig)?))
                }
                "cons" => {
                    expect_len(xs, 3, p, "cons")?;
                    Ok(Term::Cons(t(&xs[1])?, t(&xs[2])?))
                }
                "append" => {
                    expect_len(xs, 3, p, "append")?;
                    Ok(Term::Append(t(&xs[1])?, t(&xs[2])?))
                }
                "len" => {
                    expect_len(xs, 2, p, "len")?;
                    Ok(Term::Len(t(&xs[1])?))
                }
                "idx" => {
                    expect_len(xs, 3, p, "idx")?;
                    Ok(Term::Idx(t(&xs[1])?, t(&xs[2])?))
                }
                "prefix" => {
                    expect_len(xs, 3, p, "prefix")?;
                    Ok(Term::Prefix(t(&xs[1])?, t(&xs[2])?))
                }
                "max" => {
                    expect_len(xs, 2, p, "max")?;
                    Ok(Term::MaxNat(t(&xs[1])?))
                }
                other => err(p, format!("unknown term form `{other}`")),
            }
        }
    }
}

/// Parses a formula without renaming binders.
fn formula_raw(x: &Sexp, sig: &Signature) -> R<Formula> {
    let f = |y: &Sexp| formula_raw(y, sig).map(Box::new);
    let tm = |y: &Sexp| parse_term_sexp(y, sig);
    let Sexp::List(xs, p) = x else {
        return err(x.pos(), format!("expected formula, found `{x}`"));
    };
    let p = *p;
    let Some(head) = x.head() else {
        return err(p, format!("malformed formula `{x}`"));
    };
    let quant = |q: Quant| -> R<Formula> {
        expect_len(xs, 3, p, head)?;
        let (v, ty) = typed_binder(&xs[1], sig)?;
        Ok(q.build(v, ty, formula_raw(&xs[2], sig)?))
    };
    match head {
        "eq0" | "le0" | "approx" => {
            expect_len(xs, 3, p, head)?;
            let (a, b) = (tm(&xs[1])?, tm(&xs[2])?);
            Ok(match head {
                "eq0" => Formula::Eq0(a, b),
                "le0" => Formula::Le0(a, b),
                _ => Formula::Approx(a, b),
            })
        }
        "atom" => {
            if xs.len() < 2 {
                return err(p, "`atom` expects a name");
            }
            let name = ident(&xs[1])?;
            let Some(decl) = sig.atom(&name) else {
                return Err(ParseError::UnknownAtom {
                    name,
                    pos: xs[1].pos(),
                });
            };
            let args = xs[2..].iter().map(tm).collect::<R<Vec<_>>>()?;
            if args.len() != decl.sorts.len() {
                return err(
                    p,
                    format!(
                        "atom `{name}` expects {} argument(s), found {}",
                        decl.sorts.len(),
                        args.len()
                    ),
                );
            }
            Ok(Formula::Atom(name, args))
        }
        "st" => {
            expect_len(xs, 2, p, "st")?;
            Ok(Formula::St(tm(&xs[1])?))
        }
        "and" | "or" | "imp" => {
            expect_len(xs, 3, p, head)?;
            let (a, b) = (f(&xs[1])?, f(&xs[2])?);
            Ok(match head {
                "and" => Formula::And(a, b),
                "or" => Formula::Or(a, b),
                _ => Formula::Imp(a, b),
            })
        }
        "not" => {
            expect_len(xs, 2, p, "not")?;
            Ok(Formula::Not(f(&xs[1])?))
        }
        "forall" => quant(Quant::Forall),
        "exists" => quant(Quant::Exists),
        "forall-st" => quant(Quant::ForallSt),
        "exists-st" => quant(Quant::ExistsSt),
        "forall-omega" | "forall-inf" => {
            expect_len(xs, 3, p, head)?;
            let v = bare_binder(&xs[1])?;
            let body = f(&xs[2])?;
            Ok(if head == "forall-omega" {
                Formula::ForallOmega(v, body)
            } else {
                Formula::ForallInf(v, body)
            })
        }
        other => err(p, format!("unknown formula form `{other}`")),
    }
}

/// Parses a formula s-expression and renames binders apart.
pub fn parse_formula_sexp(x: &Sexp, sig: &Signature) -> R<Formula> {
    let raw = formula_raw(x, sig)?;
    let reserved = sig.vars.iter().map(|(n, _)| n.clone()).collect();
    Ok(rename_apart(&raw, reserved))
}

/// Tries to read a preamble form into `sig`; returns false when `x` is not one.
pub fn parse_preamble_form(x: &Sexp, sig: &mut Signature) -> R<bool> {
    let Some(xs) = x.as_list() else {
        return Ok(false);
    };
    let p = x.pos();
    match x.head() {
        Some("declare-sort") => {
            expect_len(xs, 2, p, "declare-sort")?;
            let name = ident(&xs[1])?;
            if name == "Nat" || sig.has_sort(&name) {
                return err(p, format!("sort `{name}` declared twice"));
            }
            sig.sorts.push(name);
            Ok(true)
        }
        Some("declare-var") => {
            expect_len(xs, 3, p, "declare-var")?;
            let name = ident(&xs[1])?;
            let ty = parse_type_sexp(&xs[2], sig)?;
            if sig.var(&name).is_some() {
                return err(p, format!("variable `{name}` declared twice"));
            }
            sig.vars.push((name, ty));
            Ok(true)
        }
        Some("declare-atom") => {
            if xs.len() < 3 {
                return err(p, "`declare-atom` expects a name and a sort list");
            }
            let name = ident(&xs[1])?;
            let Some(sorts) = xs[2].as_list() else {
                return err(xs[2].pos(), "expected sort list");
            };
            let sorts = sorts
                .iter()
                .map(|s| parse_type_sexp(s, sig))
                .collect::<R<Vec<_>>>()?;
            if let Some(t) = sorts.iter().find(|t| !t.is_base()) {
                return err(
                    p,
                    format!("atom argument sort must be Nat or declared, got {t}"),
                );
            }
            let mut decl = AtomDecl {
                name: name.clone(),
                sorts,
                decidable: false,
                monotone: vec![],
                antitone: vec![],
            };
            let mut i = 3;
            let mut target: Option<bool> = None;
            while i < xs.len() {
                match xs[i].as_atom() {
                    Some(":decidable") => {
                        decl.decidable = true;
                        target = None;
                    }
                    Some(":monotone") => target = Some(true),
                    Some(":antitone") => target = Some(false),
                    Some(n) if n.chars().all(|c| c.is_ascii_digit()) && target.is_some() => {
                        let k: usize = n.parse().map_err(|_| {
                            ParseError::Syntax(SyntaxError::new(xs[i].pos(), "bad position"))
                        })?;
                        if k >= decl.sorts.len() || decl.sorts[k] != Type::Nat {
                            return err(
                                xs[i].pos(),
                                format!("position {k} of `{name}` is not a Nat argument"),
                            );
                        }
                        if target == Some(true) {
                            decl.monotone.push(k);
                        } else {
                            decl.antitone.push(k);
                        }
                    }
                    _ => return err(xs[i].pos(), format!("unexpected `{}`", xs[i])),
                }
                i += 1;
            }
            if sig.atom(&name).is_some() {
                return err(p, format!("atom `{name}` declared twice"));
            }
            sig.atoms.push(decl);
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Splits top-level forms into a signature and the remaining forms.
pub fn split_preamble(forms: &[Sexp], sig: &mut Signature) -> R<Vec<Sexp>> {
    let mut rest = Vec::new();
    for x in forms {
        if !parse_preamble_form(x, sig)? {
            rest.push(x.clone());
        }
    }
    Ok(rest)
}

/// Parses a document: preamble forms followed by exactly one formula.
pub fn parse_document(text: &str) -> R<Document> {
    parse_document_with(text, &Signature::default())
}

/// Like [`parse_document`], starting from an existing signature.
pub fn parse_document_with(text: &str, base: &Signature) -> R<Document> {
    let forms = read_all(text)?;
    let mut sig = base.clone();
    let rest = split_preamble(&forms, &mut sig)?;
    match rest.as_slice() {
        [one] => {
            let formula = parse_formula_sexp(one, &sig)?;
            Ok(Document { sig, formula })
        }
        [] => err(Pos { line: 1, col: 1 }, "document contains no formula"),
        [_, second, ..] => err(second.pos(), "document contains more than one formula"),
    }
}

pub fn parse_formula(text: &str, sig: &Signature) -> R<Formula> {
    let forms = read_all(text)?;
    match forms.as_slice() {
        [one] => parse_formula_sexp(one, sig),
        _ => err(Pos { line: 1, col: 1 }, "expected exactly one formula"),
    }
}

pub fn parse_term(text: &str, sig: &Signature) -> R<Term> {
    let forms = read_all(text)?;
    match forms.as_slice() {
        [one] => {
            let t = parse_term_sexp(one, sig)?;
            Ok(super::alpha::rename_term_apart(&t, Default::default()))
        }
        _ => err(Pos { line: 1, col: 1 }, "expected exactly one term"),
    }
}

pub fn parse_type(text: &str, sig: &Signature) -> R<Type> {
    let forms = read_all(text)?;
    match forms.as_slice() {
        [one] => parse_type_sexp(one, sig),
        _ => err(Pos { line: 1, col: 1 }, "expected exactly one type"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        parse_document("(declare-sort Real) (declare-atom phi (Nat Nat) :decidable) (eq0 0 0)")
            .unwrap()
            .sig
    }

    #[test]
    fn st_of_var() {
        let f = parse_formula("(st n)", &sig()).unwrap();
        assert_eq!(f, Formula::St(Term::var("n")));
    }

    #[test]
    fn approx_node() {
        let f = parse_formula("(approx x y)", &sig()).unwrap();
        assert_eq!(f, Formula::Approx(Term::var("x"), Term::var("y")));
    }

    #[test]
    fn normal_form_shape() {
        let f = parse_formula(
            "(forall-st (x Nat) (exists-st (y Nat) (atom phi x y)))",
            &sig(),
        )
        .unwrap();
        let (prefix, m) = f.split_prefix();
        assert_eq!(prefix.len(), 2);
        assert_eq!(prefix[0].0, Quant::ForallSt);
        assert_eq!(prefix[1].0, Quant::ExistsSt);
        assert!(m.is_internal());
    }

    #[test]
    fn unknown_atom_reported() {
        let e = parse_formula("(atom psi 0)", &sig()).unwrap_err();
        assert!(matches!(e, ParseError::UnknownAtom { ref name, .. } if name == "psi"));
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_formula("(and (eq0 0 0)\n  (bogus 1))", &sig()).unwrap_err();
        match e {
            ParseError::Syntax(s) => assert_eq!((s.pos.line, s.pos.col), (2, 3)),
            _ => panic!(),
        }
    }

    #[test]
    fn binders_renamed_apart() {
        let f = parse_formula(
            "(and (forall (x Nat) (eq0 x x)) (forall (x Nat) (le0 x x)))",
            &sig(),
        )
        .unwrap();
        let Formula::And(a, b) = f else { panic!() };
        let (Formula::Forall(x1, ..), Formula::Forall(x2, ..)) = (*a, *b) else {
            panic!()
        };
        assert_ne!(x1, x2);
    }

    #[test]
    fn sorts_and_monotonicity() {
        let d = parse_document(
            "(declare-sort Real) (declare-atom lt (Real Nat) :decidable :antitone 1) (forall-st (x Real) (forall-st (n Nat) (atom lt x n)))",
        )
        .unwrap();
        assert_eq!(d.sig.atoms[0].antitone, vec![1]);
        let bad = parse_document(
            "(declare-sort Real) (declare-atom lt (Real Nat) :monotone 0) (eq0 0 0)",
        );
        assert!(bad.is_err());
    }
}
