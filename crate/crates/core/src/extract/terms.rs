//! Term builders used by the realizers: flattened pointwise application,
//! list maps, bounded search, and head beta-reduction.

use std::collections::HashSet;

use crate::syntax::alpha::{all_names_term, fresh, subst_term};
use crate::syntax::ast::{Term, Type};

fn avoid(ts: &[&Term]) -> HashSet<String> {
    let mut out = HashSet::new();
    for t in ts {
        out.extend(all_names_term(t));
    }
    out
}

/// `F` a list of functions of type `s -> r`, `X` a list of `s`: every
/// `f x` with `f` in `F`, `x` in `X`, row by row.
pub fn flat_apply(fs: &Term, xs: &Term, result: &Type) -> Term {
    let mut used = avoid(&[fs, xs]);
    let mut name = |b: &str| {
        let n = fresh(b, &used);
        used.insert(n.clone());
        n
    };
    let (i, j, acc, acc2) = (name("i"), name("j"), name("acc"), name("acc"));
    let out = Type::seq(result.clone());
    let cell = Term::singleton(
        Term::app(
            Term::idx(fs.clone(), Term::var(&i)),
            Term::idx(xs.clone(), Term::var(&j)),
        ),
        result.clone(),
    );
    let inner = Term::Rec(
        out.clone(),
        Box::new(Term::Nil(result.clone())),
        Box::new(Term::lam(
            &j,
            Type::Nat,
            Term::lam(
                &acc2,
                out.clone(),
                Term::Append(Box::new(Term::var(&acc2)), Box::new(cell)),
            ),
        )),
        Box::new(Term::len(xs.clone())),
    );
    Term::Rec(
        out.clone(),
        Box::new(Term::Nil(result.clone())),
        Box::new(Term::lam(
            &i,
            Type::Nat,
            Term::lam(
                &acc,
                out,
                Term::Append(Box::new(Term::var(&acc)), Box::new(inner)),
            ),
        )),
        Box::new(Term::len(fs.clone())),
    )
}

/// `W` a list of `Seq Nat`: the list of their maxima.
pub fn map_max(w: &Term) -> Term {
    let used = avoid(&[w]);
    let i = fresh("i", &used);
    let acc = fresh("acc", &used);
    let out = Type::seq(Type::Nat);
    Term::Rec(
        out.clone(),
        Box::new(Term::Nil(Type::Nat)),
        Box::new(Term::lam(
            &i,
            Type::Nat,
            Term::lam(
                &acc,
                out,
                Term::Append(
                    Box::new(Term::var(&acc)),
                    Box::new(Term::singleton(
                        Term::max_nat(Term::idx(w.clone(), Term::var(&i))),
                        Type::Nat,
                    )),
                ),
            ),
        )),
        Box::new(Term::len(w.clone())),
    )
}

/// `n - 1`, with `0 - 1 = 0`.
pub fn pred(n: Term) -> Term {
    let used = avoid(&[&n]);
    let k = fresh("k", &used);
    let r = fresh("r", &used);
    Term::Rec(
        Type::Nat,
        Box::new(Term::Zero),
        Box::new(Term::lam(
            &k,
            Type::Nat,
            Term::lam(&r, Type::Nat, Term::var(&k)),
        )),
        Box::new(n),
    )
}

/// `if n = 0 then a else b`, all of type `Nat`.
pub fn if_zero(n: Term, a: Term, b: Term) -> Term {
    let used = avoid(&[&n, &a, &b]);
    let u = fresh("u", &used);
    let v = fresh("v", &used);
    Term::Rec(
        Type::Nat,
        Box::new(a),
        Box::new(Term::lam(&u, Type::Nat, Term::lam(&v, Type::Nat, b))),
        Box::new(n),
    )
}

/// Least `n <= bound` with `f n = 0`, or `0` when there is none.
///
/// The accumulator holds `0` while nothing is found and `n + 1` after the
/// first hit; the outer `pred` undoes the shift.
pub fn bounded_mu(bound: u64) -> Term {
    let f = Term::var("f");
    let n = Term::var("n");
    let acc = Term::var("acc");
    let hit = if_zero(
        Term::app(f.clone(), n.clone()),
        Term::succ(n.clone()),
        Term::Zero,
    );
    let keep = if_zero(acc.clone(), hit, acc);
    let search = Term::Rec(
        Type::Nat,
        Box::new(Term::Zero),
        Box::new(Term::lam("n", Type::Nat, Term::lam("acc", Type::Nat, keep))),
        Box::new(Term::numeral(bound + 1)),
    );
    Term::lam("f", Type::arrow(Type::Nat, Type::Nat), pred(search))
}

/// Applies `t` to variables, substituting under leading lambdas.
pub fn apply_vars(t: &Term, vars: &[String]) -> Term {
    let mut cur = t.clone();
    for v in vars {
        cur = match cur {
            Term::Lam(x, _, body) => subst_term(&body, &x, &Term::var(v)),
            other => Term::app(other, Term::var(v)),
        };
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{normalize, Value};
    use crate::syntax::parse::parse_term;
    use crate::syntax::Signature;

    fn t(s: &str) -> Term {
        parse_term(s, &Signature::default()).unwrap()
    }

    fn nums(v: &Value) -> Vec<u64> {
        v.as_seq()
            .unwrap()
            .iter()
            .map(|x| x.as_num().unwrap())
            .collect()
    }

    #[test]
    fn flat_apply_on_two_element_lists() {
        let fs = t("(cons (lam (x Nat) (succ x)) (cons (lam (x Nat) 0) (nil (-> Nat Nat))))");
        let xs = t("(cons 3 (cons 5 (nil Nat)))");
        let v = normalize(&flat_apply(&fs, &xs, &Type::Nat)).unwrap();
        assert_eq!(nums(&v), vec![4, 6, 0, 0]);
    }

    #[test]
    fn map_max_of_lists() {
        let w = t("(cons (cons 1 (cons 7 (nil Nat))) (cons (nil Nat) (cons (cons 2 (nil Nat)) (nil (Seq Nat)))))");
        assert_eq!(nums(&normalize(&map_max(&w)).unwrap()), vec![7, 0, 2]);
    }

    #[test]
    fn pred_and_if_zero() {
        assert_eq!(normalize(&pred(Term::numeral(5))).unwrap(), Value::Num(4));
        assert_eq!(normalize(&pred(Term::Zero)).unwrap(), Value::Num(0));
        let z = if_zero(Term::Zero, Term::numeral(1), Term::numeral(2));
        assert_eq!(normalize(&z).unwrap(), Value::Num(1));
        let nz = if_zero(Term::numeral(3), Term::numeral(1), Term::numeral(2));
        assert_eq!(normalize(&nz).unwrap(), Value::Num(2));
    }

    #[test]
    fn bounded_search() {
        let mu = bounded_mu(32);
        // first zero of n |-> 10 - n at 10
        let f = t("(lam (n Nat) (rec Nat 10 (lam (a Nat) (lam (b Nat) (rec Nat 0 (lam (k Nat) (lam (r Nat) k)) b))) n))");
        assert_eq!(
            normalize(&Term::app(mu.clone(), f)).unwrap(),
            Value::Num(10)
        );
        let never = t("(lam (n Nat) 1)");
        assert_eq!(
            normalize(&Term::app(mu.clone(), never)).unwrap(),
            Value::Num(0)
        );
        let at0 = t("(lam (n Nat) 0)");
        assert_eq!(normalize(&Term::app(mu, at0)).unwrap(), Value::Num(0));
    }

    #[test]
    fn head_beta() {
        let s = t("(lam (x Nat) (lam (k Nat) (succ k)))");
        let r = apply_vars(&s, &["a".into(), "b".into()]);
        assert_eq!(r, Term::succ(Term::var("b")));
        let r = apply_vars(&Term::var("g"), &["a".into()]);
        assert_eq!(r, Term::app(Term::var("g"), Term::var("a")));
    }
}
