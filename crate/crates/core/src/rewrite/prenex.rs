//! Moving st-quantifiers outward. Internal quantifiers stay in place.

use std::collections::VecDeque;

use crate::syntax::ast::*;

use super::path::{get_at, polarity_at, replace_at, Path, PathDisplay};
use super::{mismatch, Engine, Mode, RResult, RewriteError};

type Prefix = Vec<(Quant, String, Type)>;

pub fn prenex_st(e: &Engine, f: &Formula) -> RResult<Formula> {
    prenex_at(e, f, &[])
}

/// Prenexes the subformula at `path`, using its polarity inside `f` to
/// order merged blocks.
pub fn prenex_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    let sub = get_at(f, path).ok_or_else(|| RewriteError::BadPath(PathDisplay(path.to_vec())))?;
    let pos = polarity_at(f, path).unwrap();
    prenex_with(e, f, path, sub, pos)
}

/// Like [`prenex_at`] but orders blocks as if the subformula stood alone.
pub fn prenex_local_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    let sub = get_at(f, path).ok_or_else(|| RewriteError::BadPath(PathDisplay(path.to_vec())))?;
    prenex_with(e, f, path, sub, true)
}

fn prenex_with(
    e: &Engine,
    f: &Formula,
    path: &[usize],
    sub: &Formula,
    pos: bool,
) -> RResult<Formula> {
    let mut p = path.to_vec();
    let (prefix, m) = go(e, sub, pos, &mut p)?;
    Ok(replace_at(f, path, Formula::with_prefix(&prefix, m)).unwrap())
}

fn dual(p: Prefix) -> Prefix {
    p.into_iter().map(|(q, x, t)| (q.dual(), x, t)).collect()
}

/// Interleaves two independent prefixes, taking every quantifier that ends
/// up universal (at this polarity) first, then every existential, and so on.
fn merge(l: Prefix, r: Prefix, pos: bool) -> Prefix {
    let mut l: VecDeque<_> = l.into();
    let mut r: VecDeque<_> = r.into();
    let mut out = Vec::new();
    let mut want_univ = true;
    while !l.is_empty() || !r.is_empty() {
        loop {
            let wants = |q: &(Quant, String, Type)| (q.0.is_universal() == pos) == want_univ;
            if l.front().is_some_and(wants) {
                out.push(l.pop_front().unwrap());
            } else if r.front().is_some_and(wants) {
                out.push(r.pop_front().unwrap());
            } else {
                break;
            }
        }
        want_univ = !want_univ;
    }
    out
}

fn classical(e: &Engine, path: &[usize]) -> RResult<()> {
    if e.mode == Mode::H {
        let _ = path;
        return Err(RewriteError::WrongMode {
            rule: "prenex".into(),
            mode: Mode::H,
        });
    }
    Ok(())
}

fn has(p: &Prefix, q: Quant) -> bool {
    p.iter().any(|(k, _, _)| *k == q)
}

fn go(e: &Engine, f: &Formula, pos: bool, path: &mut Path) -> RResult<(Prefix, Formula)> {
    let mut sub = |i: usize, g: &Formula, pos: bool| -> RResult<(Prefix, Formula)> {
        path.push(i);
        let r = go(e, g, pos, path);
        path.pop();
        r
    };
    match f {
        Formula::Approx(..) | Formula::ForallOmega(..) | Formula::ForallInf(..) => {
            mismatch("prenex", path, "abbreviation present; unfold first")
        }
        Formula::Imp(a, b) => {
            let (pa, ma) = sub(0, a, !pos)?;
            let (pb, mb) = sub(1, b, pos)?;
            if has(&pa, Quant::ForallSt) || has(&pb, Quant::ExistsSt) {
                classical(e, path)?;
            }
            Ok((merge(dual(pa), pb, pos), Formula::imp(ma, mb)))
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (pa, ma) = sub(0, a, pos)?;
            let (pb, mb) = sub(1, b, pos)?;
            let is_or = matches!(f, Formula::Or(..));
            if is_or && (has(&pa, Quant::ForallSt) || has(&pb, Quant::ForallSt)) {
                classical(e, path)?;
            }
            let m = if is_or {
                Formula::or(ma, mb)
            } else {
                Formula::and(ma, mb)
            };
            Ok((merge(pa, pb, pos), m))
        }
        Formula::Not(a) => {
            let (pa, ma) = sub(0, a, !pos)?;
            if has(&pa, Quant::ForallSt) {
                classical(e, path)?;
            }
            Ok((dual(pa), Formula::not(ma)))
        }
        Formula::ForallSt(x, t, b) | Formula::ExistsSt(x, t, b) => {
            let q = f.as_quant().unwrap().0;
            let (mut pb, mb) = sub(0, b, pos)?;
            pb.insert(0, (q, x.clone(), t.clone()));
            Ok((pb, mb))
        }
        Formula::Forall(x, t, b) | Formula::Exists(x, t, b) => {
            let q = f.as_quant().unwrap().0;
            let passes = if q == Quant::Forall {
                Quant::ForallSt
            } else {
                Quant::ExistsSt
            };
            let (pb, mb) = sub(0, b, pos)?;
            let cut = pb.iter().take_while(|(k, _, _)| *k == passes).count();
            let mut out = pb;
            let rest = out.split_off(cut);
            if q == Quant::Exists && rest.first().is_some_and(|r| r.0 == Quant::ForallSt) {
                return Err(RewriteError::NonPrenexable(PathDisplay(path.clone())));
            }
            let inner = Formula::with_prefix(&rest, mb);
            Ok((out, q.build(x.clone(), t.clone(), inner)))
        }
        atomic => Ok((vec![], atomic.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::unfold::{omega_bound_at, unfold_abbrevs};
    use crate::syntax::parse::parse_document;
    use crate::syntax::print::print_formula;

    const PRE: &str = "(declare-sort Real)\n(declare-atom lt-inv-dist (Real Real Nat) :decidable :antitone 2)\n(declare-var f (-> Real Real))\n(declare-var xs (-> Nat Real))\n(declare-var xlim Real)\n(declare-atom p (Nat))\n(declare-atom q (Nat))\n";

    fn run(body: &str, mode: Mode) -> RResult<String> {
        let d = parse_document(&format!("{PRE}{body}")).unwrap();
        let e = Engine::new(d.sig, mode);
        let g = unfold_abbrevs(&e, &d.formula)?;
        prenex_st(&e, &g).map(|h| print_formula(&h))
    }

    #[test]
    fn continuity_prefix() {
        let s = run(
            "(forall-st (x Real) (forall (y Real) (imp (approx x y) (approx (app f x) (app f y)))))",
            Mode::P,
        )
        .unwrap();
        assert_eq!(
            s,
            "(forall-st (x Real) (forall-st (n1 Nat) (forall (y Real) (exists-st (n Nat) (imp (atom lt-inv-dist x y n) (atom lt-inv-dist (app f x) (app f y) n1))))))"
        );
    }

    #[test]
    fn convergence_prefix() {
        let d =
            parse_document(&format!("{PRE}(forall-omega (N) (approx (app xs N) xlim))")).unwrap();
        let e = Engine::new(d.sig, Mode::P);
        let g = unfold_abbrevs(&e, &d.formula).unwrap();
        let g = omega_bound_at(&e, &g, &[0, 0]).unwrap();
        assert_eq!(
            print_formula(&prenex_st(&e, &g).unwrap()),
            "(forall-st (n Nat) (forall (N Nat) (exists-st (m Nat) (imp (le0 m N) (atom lt-inv-dist (app xs N) xlim n)))))"
        );
    }

    #[test]
    fn already_prenex_unchanged() {
        let s = run("(forall-st (x Nat) (atom p x))", Mode::P).unwrap();
        assert_eq!(s, "(forall-st (x Nat) (atom p x))");
    }

    #[test]
    fn negative_context_orders_for_final_polarity() {
        let s = run(
            "(imp (and (forall-st (a Nat) (atom p a)) (not (forall-st (b Nat) (atom q b)))) (eq0 0 0))",
            Mode::P,
        )
        .unwrap();
        assert_eq!(
            s,
            "(forall-st (b Nat) (exists-st (a Nat) (imp (and (atom p a) (not (atom q b))) (eq0 0 0))))"
        );
    }

    #[test]
    fn h_mode_refuses_classical_moves() {
        let r = run("(imp (forall-st (a Nat) (atom p a)) (eq0 0 0))", Mode::H);
        assert!(matches!(r, Err(RewriteError::WrongMode { .. })));
        let ok = run("(imp (exists-st (a Nat) (atom p a)) (eq0 0 0))", Mode::H).unwrap();
        assert_eq!(ok, "(forall-st (a Nat) (imp (atom p a) (eq0 0 0)))");
    }

    #[test]
    fn existential_over_standard_universal_blocks() {
        let r = run("(exists (y Nat) (forall-st (x Nat) (le0 x y)))", Mode::P);
        assert!(matches!(r, Err(RewriteError::NonPrenexable(_))));
    }
}
