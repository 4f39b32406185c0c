//! Max-collapse: `(exists-st (z (Seq Nat))) .. (exists N in z) psi(N)` becomes
//! `(exists-st (N Nat)) .. psi(N)` when `psi` only gets truer as `N` grows.

use crate::syntax::alpha::{free_vars, replace_subterm};
use crate::syntax::ast::*;
use crate::syntax::print::print_term;

use super::path::{all_paths, get_at, polarity_at, replace_at, Path, PathDisplay};
use super::{element_name, match_exists_in, mismatch, Engine, RResult, RewriteError};

/// Result of a collapse plus the per-occurrence justification lines.
#[derive(Clone, Debug)]
pub struct Collapsed {
    pub formula: Formula,
    pub justification: Vec<String>,
}

pub fn max_collapse_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Collapsed> {
    let node = get_at(f, path).ok_or_else(|| RewriteError::BadPath(PathDisplay(path.to_vec())))?;
    let Formula::ExistsSt(list, ty, body) = node else {
        return mismatch(
            "max-collapse",
            path,
            "expected (exists-st (z (Seq Nat)) ..)",
        );
    };
    if *ty != Type::seq(Type::Nat) {
        return mismatch(
            "max-collapse",
            path,
            format!("`{list}` is not of type (Seq Nat)"),
        );
    }
    let not_mono = |detail: String| RewriteError::NotMonotone {
        binder: list.clone(),
        detail,
    };
    let lv = Term::var(list);
    let site = all_paths(body).into_iter().find(|p| {
        get_at(body, p)
            .and_then(match_exists_in)
            .is_some_and(|(_, l, _)| *l == lv)
    });
    let Some(site) = site else {
        return mismatch(
            "max-collapse",
            path,
            format!("no bounded (exists _ in {list}) under the binder"),
        );
    };
    if !polarity_at(body, &site).unwrap() {
        return Err(not_mono("bounded existential occurs negatively".into()));
    }
    let (i, _, psi) = match_exists_in(get_at(body, &site).unwrap()).unwrap();
    let target = Term::idx(lv.clone(), Term::var(i));
    let mut justification = Vec::new();
    check_occurrences(e, psi, &target, true, &mut justification).map_err(not_mono)?;
    let mut names = e.names(f);
    let n = element_name(list, &mut names);
    let nv = Term::var(&n);
    let psi2 = replace_subterm(psi, &target, &nv);
    let fv = free_vars(&psi2);
    if fv.contains(i) || fv.contains(list.as_str()) {
        return Err(not_mono(format!(
            "`{list}` or its index is used outside (idx {list} {i})"
        )));
    }
    let body2 = replace_at(body, &site, psi2).unwrap();
    if free_vars(&body2).contains(list.as_str()) {
        return Err(not_mono(format!("`{list}` has other uses")));
    }
    let new = Formula::ExistsSt(n, Type::Nat, Box::new(body2));
    Ok(Collapsed {
        formula: replace_at(f, path, new).unwrap(),
        justification,
    })
}

/// Collapses the st-existential binding `binder`.
pub fn max_collapse(e: &Engine, f: &Formula, binder: &str) -> RResult<Collapsed> {
    let path = find_binder(f, binder).ok_or_else(|| RewriteError::PatternMismatch {
        rule: "max-collapse".into(),
        path: PathDisplay(vec![]),
        detail: format!("no (exists-st ({binder} ..)) in the formula"),
    })?;
    max_collapse_at(e, f, &path)
}

pub(crate) fn find_binder(f: &Formula, binder: &str) -> Option<Path> {
    all_paths(f)
        .into_iter()
        .find(|p| matches!(get_at(f, p), Some(Formula::ExistsSt(x, _, _)) if x == binder))
}

fn contains(t: &Term, target: &Term) -> bool {
    t == target
        || crate::syntax::alpha::term_children(t)
            .into_iter()
            .any(|c| contains(c, target))
}

/// Every occurrence of `target` must sit directly in an argument position
/// whose annotation makes the formula truer as the value grows.
pub(crate) fn check_occurrences(
    e: &Engine,
    f: &Formula,
    target: &Term,
    pos: bool,
    out: &mut Vec<String>,
) -> Result<(), String> {
    let tgt = print_term(target);
    let arg_ok =
        |args: &[Term], mono: &[usize], anti: &[usize], name: &str, out: &mut Vec<String>| {
            for (j, a) in args.iter().enumerate() {
                if !contains(a, target) {
                    continue;
                }
                if a != target {
                    return Err(format!("{tgt} is nested inside argument {j} of {name}"));
                }
                let up = mono.contains(&j);
                let down = anti.contains(&j);
                if (up && pos) || (down && !pos) {
                    let dir = if up { "monotone" } else { "antitone" };
                    let pol = if pos { "positive" } else { "negative" };
                    out.push(format!("{name} argument {j}: {dir}, {pol} occurrence"));
                } else if up || down {
                    return Err(format!(
                        "{name} argument {j} points the wrong way at this polarity"
                    ));
                } else {
                    return Err(format!(
                        "{name} argument {j} carries no monotonicity annotation"
                    ));
                }
            }
            Ok(())
        };
    match f {
        Formula::Le0(a, b) => arg_ok(&[a.clone(), b.clone()], &[1], &[0], "le0", out),
        Formula::Eq0(a, b) => arg_ok(&[a.clone(), b.clone()], &[], &[], "eq0", out),
        Formula::Atom(n, args) => match e.sig.atom(n) {
            Some(d) => arg_ok(args, &d.monotone, &d.antitone, n, out),
            None => arg_ok(args, &[], &[], n, out),
        },
        Formula::St(t) | Formula::Approx(t, _) if contains(t, target) => {
            Err(format!("{tgt} occurs under an external node"))
        }
        Formula::Approx(_, t) if contains(t, target) => {
            Err(format!("{tgt} occurs under an external node"))
        }
        Formula::Not(a) => check_occurrences(e, a, target, !pos, out),
        Formula::Imp(a, b) => {
            check_occurrences(e, a, target, !pos, out)?;
            check_occurrences(e, b, target, pos, out)
        }
        _ => {
            for c in f.children() {
                check_occurrences(e, c, target, pos, out)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::Mode;
    use crate::syntax::parse::parse_document;
    use crate::syntax::print::print_formula;

    const PRE: &str = "(declare-sort Real)\n(declare-atom d (Real Real Nat) :antitone 2)\n(declare-atom big (Nat) :monotone 0)\n(declare-atom plain (Nat))\n(declare-var x Real)\n";

    fn setup(body: &str) -> (Engine, Formula) {
        let d = parse_document(&format!("{PRE}{body}")).unwrap();
        (Engine::new(d.sig, Mode::P), d.formula)
    }

    #[test]
    fn antitone_in_antecedent() {
        let (e, f) = setup(
            "(exists-st (ns (Seq Nat)) (forall (y Real) (exists (i Nat) (and (le0 (succ i) (len ns)) (imp (atom d x y (idx ns i)) (eq0 0 0))))))",
        );
        let c = max_collapse(&e, &f, "ns").unwrap();
        assert_eq!(
            print_formula(&c.formula),
            "(exists-st (n Nat) (forall (y Real) (imp (atom d x y n) (eq0 0 0))))"
        );
        assert_eq!(c.justification.len(), 1);
    }

    #[test]
    fn monotone_positive_and_le0() {
        let (e, f) = setup(
            "(exists-st (ms (Seq Nat)) (exists (i Nat) (and (le0 (succ i) (len ms)) (and (atom big (idx ms i)) (le0 3 (idx ms i))))))",
        );
        let c = max_collapse_at(&e, &f, &[]).unwrap();
        assert_eq!(
            print_formula(&c.formula),
            "(exists-st (m Nat) (and (atom big m) (le0 3 m)))"
        );
    }

    #[test]
    fn guards() {
        let (e, f) = setup(
            "(exists-st (ms (Seq Nat)) (exists (i Nat) (and (le0 (succ i) (len ms)) (atom plain (idx ms i)))))",
        );
        assert!(matches!(
            max_collapse_at(&e, &f, &[]),
            Err(RewriteError::NotMonotone { .. })
        ));
        let (e, f) = setup(
            "(exists-st (ms (Seq Nat)) (exists (i Nat) (and (le0 (succ i) (len ms)) (eq0 (idx ms i) 2))))",
        );
        assert!(matches!(
            max_collapse_at(&e, &f, &[]),
            Err(RewriteError::NotMonotone { .. })
        ));
        let (e, f) = setup(
            "(exists-st (ms (Seq Nat)) (exists (i Nat) (and (le0 (succ i) (len ms)) (not (atom big (idx ms i))))))",
        );
        assert!(matches!(
            max_collapse_at(&e, &f, &[]),
            Err(RewriteError::NotMonotone { .. })
        ));
        let (e, f) = setup("(exists-st (m Nat) (atom big m))");
        assert!(matches!(
            max_collapse_at(&e, &f, &[]),
            Err(RewriteError::PatternMismatch { .. })
        ));
    }

    #[test]
    fn second_use_blocks() {
        let (e, f) = setup(
            "(exists-st (ms (Seq Nat)) (and (le0 (len ms) 4) (exists (i Nat) (and (le0 (succ i) (len ms)) (atom big (idx ms i))))))",
        );
        assert!(matches!(
            max_collapse_at(&e, &f, &[]),
            Err(RewriteError::NotMonotone { .. })
        ));
    }
}
