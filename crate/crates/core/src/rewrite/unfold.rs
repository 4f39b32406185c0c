//! Abbreviation unfolding and the `omega-bound` reading of `(not (st N))`.

use crate::syntax::alpha::NameSupply;
use crate::syntax::ast::*;
use crate::syntax::typing::{infinitesimal_sort, TypeError, ABS_ATOM, DIST_ATOM};

use super::path::{binders_at, get_at, replace_at, Path, PathDisplay};
use super::{mismatch, Engine, RResult, RewriteError};

fn missing(e: TypeError) -> RewriteError {
    match e {
        TypeError::MissingAtomDecl(n) => RewriteError::MissingAtomDecl(n),
        other => RewriteError::MissingAtomDecl(other.to_string()),
    }
}

/// Removes every `approx`, `forall-omega` and `forall-inf` node.
pub fn unfold_abbrevs(e: &Engine, f: &Formula) -> RResult<Formula> {
    unfold_at(e, f, &[])
}

pub fn unfold_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    let sub = get_at(f, path).ok_or_else(|| RewriteError::BadPath(PathDisplay(path.to_vec())))?;
    let mut names = e.names(f);
    let new = go(e, sub, &mut names)?;
    Ok(replace_at(f, path, new).unwrap())
}

fn go(e: &Engine, f: &Formula, names: &mut NameSupply) -> RResult<Formula> {
    let rec = |g: &Formula, names: &mut NameSupply| go(e, g, names).map(Box::new);
    Ok(match f {
        Formula::Approx(t, s) => {
            if e.sig.atom(DIST_ATOM).is_none() {
                return Err(RewriteError::MissingAtomDecl(DIST_ATOM.into()));
            }
            let n = names.fresh("n");
            Formula::ForallSt(
                n.clone(),
                Type::Nat,
                Box::new(Formula::atom(
                    DIST_ATOM,
                    vec![t.clone(), s.clone(), Term::var(&n)],
                )),
            )
        }
        Formula::ForallOmega(x, b) => Formula::Forall(
            x.clone(),
            Type::Nat,
            Box::new(Formula::imp(
                Formula::not(Formula::St(Term::var(x))),
                *rec(b, names)?,
            )),
        ),
        Formula::ForallInf(x, b) => {
            let ty = infinitesimal_sort(&e.sig).map_err(missing)?;
            let k = names.fresh("k");
            let guard = Formula::ForallSt(
                k.clone(),
                Type::Nat,
                Box::new(Formula::atom(ABS_ATOM, vec![Term::var(x), Term::var(&k)])),
            );
            Formula::Forall(
                x.clone(),
                ty,
                Box::new(Formula::imp(guard, *rec(b, names)?)),
            )
        }
        Formula::And(a, b) => Formula::And(rec(a, names)?, rec(b, names)?),
        Formula::Or(a, b) => Formula::Or(rec(a, names)?, rec(b, names)?),
        Formula::Imp(a, b) => Formula::Imp(rec(a, names)?, rec(b, names)?),
        Formula::Not(a) => Formula::Not(rec(a, names)?),
        Formula::Forall(x, t, b) => Formula::Forall(x.clone(), t.clone(), rec(b, names)?),
        Formula::Exists(x, t, b) => Formula::Exists(x.clone(), t.clone(), rec(b, names)?),
        Formula::ForallSt(x, t, b) => Formula::ForallSt(x.clone(), t.clone(), rec(b, names)?),
        Formula::ExistsSt(x, t, b) => Formula::ExistsSt(x.clone(), t.clone(), rec(b, names)?),
        atomic => atomic.clone(),
    })
}

fn nat_variable(e: &Engine, f: &Formula, path: &[usize], x: &str) -> bool {
    let scope = binders_at(f, path).unwrap_or_default();
    match scope.iter().rev().find(|(n, _)| n == x) {
        Some((_, ty)) => ty.as_ref() == Some(&Type::Nat),
        None => e.sig.var(x) == Some(&Type::Nat),
    }
}

/// `(not (st N))` with `N : Nat` becomes `(forall-st (m Nat) (le0 m N))`.
pub fn omega_bound_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    let sub = get_at(f, path).ok_or_else(|| RewriteError::BadPath(PathDisplay(path.to_vec())))?;
    let Formula::Not(inner) = sub else {
        return mismatch("omega-bound", path, "expected (not (st N))");
    };
    let Formula::St(Term::Var(x)) = &**inner else {
        return mismatch("omega-bound", path, "expected (not (st N))");
    };
    if !nat_variable(e, f, path, x) {
        return mismatch("omega-bound", path, format!("`{x}` is not a Nat variable"));
    }
    let m = e.names(f).fresh("m");
    let new = Formula::ForallSt(
        m.clone(),
        Type::Nat,
        Box::new(Formula::Le0(Term::var(&m), Term::var(x))),
    );
    Ok(replace_at(f, path, new).unwrap())
}

/// Every position where [`omega_bound_at`] applies, in pre-order.
pub fn omega_bound_sites(e: &Engine, f: &Formula) -> Vec<Path> {
    super::path::all_paths(f)
        .into_iter()
        .filter(|p| omega_bound_at(e, f, p).is_ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::Mode;
    use crate::syntax::parse::parse_document;
    use crate::syntax::print::print_formula;

    const PRE: &str = "(declare-sort Real)\n(declare-atom lt-inv-dist (Real Real Nat) :decidable :antitone 2)\n(declare-atom lt-inv-abs (Real Nat) :decidable :antitone 1)\n(declare-var x Real)\n(declare-var y Real)\n(declare-var xs (-> Nat Real))\n";

    fn doc(body: &str) -> (Engine, Formula) {
        let d = parse_document(&format!("{PRE}{body}")).unwrap();
        (Engine::new(d.sig, Mode::P), d.formula)
    }

    #[test]
    fn approx_unfolds_to_st_bound() {
        let (e, f) = doc("(approx x y)");
        let g = unfold_abbrevs(&e, &f).unwrap();
        assert_eq!(
            print_formula(&g),
            "(forall-st (n Nat) (atom lt-inv-dist x y n))"
        );
    }

    #[test]
    fn internal_unchanged() {
        let (e, f) = doc("(forall (z Nat) (le0 z z))");
        assert_eq!(unfold_abbrevs(&e, &f).unwrap(), f);
    }

    #[test]
    fn omega_then_bound() {
        let (e, f) = doc("(forall-omega (N) (approx (app xs N) x))");
        let g = unfold_abbrevs(&e, &f).unwrap();
        assert_eq!(
            print_formula(&g),
            "(forall (N Nat) (imp (not (st N)) (forall-st (n Nat) (atom lt-inv-dist (app xs N) x n))))"
        );
        let sites = omega_bound_sites(&e, &g);
        assert_eq!(sites, vec![vec![0, 0]]);
        let h = omega_bound_at(&e, &g, &sites[0]).unwrap();
        assert_eq!(
            print_formula(&h),
            "(forall (N Nat) (imp (forall-st (m Nat) (le0 m N)) (forall-st (n Nat) (atom lt-inv-dist (app xs N) x n))))"
        );
    }

    #[test]
    fn infinitesimal_binder_sort() {
        let (e, f) = doc("(forall-inf (eps) (atom lt-inv-abs eps 0))");
        let g = unfold_abbrevs(&e, &f).unwrap();
        assert_eq!(
            print_formula(&g),
            "(forall (eps Real) (imp (forall-st (k Nat) (atom lt-inv-abs eps k)) (atom lt-inv-abs eps 0)))"
        );
    }

    #[test]
    fn missing_declaration() {
        let d =
            parse_document("(declare-sort Real)\n(declare-var x Real)\n(forall-inf (e) (eq0 0 0))")
                .unwrap();
        let e = Engine::new(d.sig, Mode::P);
        assert_eq!(
            unfold_abbrevs(&e, &d.formula),
            Err(RewriteError::MissingAtomDecl(ABS_ATOM.into()))
        );
    }
}
