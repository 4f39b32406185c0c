//! Idealisation, HAC_int, NCR, HGMP, HIP and overspill as positional rewrites.

use crate::syntax::alpha::{substitute, NameSupply};
use crate::syntax::ast::*;

use super::path::{get_at, replace_at, PathDisplay};
use super::{exists_in, forall_in, list_name, mismatch, Engine, Mode, RResult, RewriteError};

type Block = Vec<(String, Type)>;

fn node<'a>(f: &'a Formula, path: &[usize]) -> RResult<&'a Formula> {
    get_at(f, path).ok_or_else(|| RewriteError::BadPath(PathDisplay(path.to_vec())))
}

/// Splits the maximal run of `q` binders.
fn run_of(f: &Formula, q: Quant) -> (Block, &Formula) {
    let mut out = Vec::new();
    let mut cur = f;
    while let Some((k, x, t, b)) = cur.as_quant() {
        if k != q {
            break;
        }
        out.push((x.to_string(), t.clone()));
        cur = b;
    }
    (out, cur)
}

fn wrap(q: Quant, block: &Block, body: Formula) -> Formula {
    block
        .iter()
        .rev()
        .fold(body, |acc, (x, t)| q.build(x.clone(), t.clone(), acc))
}

/// Replaces each binder `x_j` by `(idx l_j i_j)` and wraps the body in the
/// bounded quantifiers given by `bound` (either [`exists_in`] or [`forall_in`]).
fn bounded(
    block: &Block,
    lists: &[Term],
    body: &Formula,
    names: &mut NameSupply,
    bound: fn(&str, Term, Formula) -> Formula,
) -> Formula {
    let idx: Vec<String> = block.iter().map(|_| names.fresh("i")).collect();
    let mut b = body.clone();
    for (((x, _), l), i) in block.iter().zip(lists).zip(&idx) {
        b = substitute(&b, x, &Term::idx(l.clone(), Term::var(i)));
    }
    for (l, i) in lists.iter().zip(&idx).rev() {
        b = bound(i, l.clone(), b);
    }
    b
}

fn list_block(block: &Block, names: &mut NameSupply) -> (Block, Vec<Term>) {
    let lb: Block = block
        .iter()
        .map(|(x, t)| (list_name(x, names), Type::seq(t.clone())))
        .collect();
    let terms = lb.iter().map(|(l, _)| Term::var(l)).collect();
    (lb, terms)
}

/// `(forall y..)(exists-st x..) psi` becomes
/// `(exists-st xs..)(forall y..)(exists x in xs..) psi`.
pub fn idealize_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    ideal_like(e, f, path, "idealize")
}

/// NCR: the same shape with an arbitrary matrix, H-mode only when the
/// matrix is external.
pub fn ncr_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    ideal_like(e, f, path, "ncr")
}

fn ideal_like(e: &Engine, f: &Formula, path: &[usize], rule: &str) -> RResult<Formula> {
    let n = node(f, path)?;
    let (ys, rest) = run_of(n, Quant::Forall);
    let (xs, psi) = run_of(rest, Quant::ExistsSt);
    if ys.is_empty() || xs.is_empty() {
        return mismatch(rule, path, "expected (forall y)(exists-st x) ...");
    }
    if !psi.is_internal() {
        match (rule, e.mode) {
            ("ncr", Mode::P) => {
                return Err(RewriteError::WrongMode {
                    rule: rule.into(),
                    mode: e.mode,
                })
            }
            (_, Mode::P) => {
                return Err(RewriteError::NonInternalMatrix {
                    rule: rule.into(),
                    path: PathDisplay(path.to_vec()),
                })
            }
            _ => {}
        }
    }
    let mut names = e.names(f);
    let (lb, lists) = list_block(&xs, &mut names);
    let body = bounded(&xs, &lists, psi, &mut names, exists_in);
    let new = wrap(Quant::ExistsSt, &lb, wrap(Quant::Forall, &ys, body));
    Ok(replace_at(f, path, new).unwrap())
}

/// HAC_int: `(forall-st x..)(exists-st y..) psi` becomes
/// `(exists-st G..)(forall-st x..)(exists y in G x..) psi`.
pub fn hac_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    let n = node(f, path)?;
    let (xs, rest) = run_of(n, Quant::ForallSt);
    let (ys, psi) = run_of(rest, Quant::ExistsSt);
    if xs.is_empty() || ys.is_empty() {
        return mismatch("hac", path, "expected (forall-st x)(exists-st y) ...");
    }
    if e.mode == Mode::P && !psi.is_internal() {
        return Err(RewriteError::NonInternalMatrix {
            rule: "hac".into(),
            path: PathDisplay(path.to_vec()),
        });
    }
    let mut names = e.names(f);
    let arg_types: Vec<Type> = xs.iter().map(|(_, t)| t.clone()).collect();
    let gs: Block = ys
        .iter()
        .map(|(_, t)| {
            (
                names.fresh("G"),
                Type::curried(&arg_types, Type::seq(t.clone())),
            )
        })
        .collect();
    let lists: Vec<Term> = gs
        .iter()
        .map(|(g, _)| Term::apps(Term::var(g), xs.iter().map(|(x, _)| Term::var(x))))
        .collect();
    let body = bounded(&ys, &lists, psi, &mut names, exists_in);
    let new = wrap(Quant::ExistsSt, &gs, wrap(Quant::ForallSt, &xs, body));
    Ok(replace_at(f, path, new).unwrap())
}

fn require_h(e: &Engine, rule: &str) -> RResult<()> {
    if e.mode != Mode::H {
        return Err(RewriteError::WrongMode {
            rule: rule.into(),
            mode: e.mode,
        });
    }
    Ok(())
}

/// HGMP: `(imp (forall-st x..) phi) psi` becomes
/// `(exists-st xs..) (imp (forall x in xs..) phi) psi`.
pub fn hgmp_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    require_h(e, "hgmp")?;
    let Formula::Imp(a, psi) = node(f, path)? else {
        return mismatch("hgmp", path, "expected an implication");
    };
    let (xs, phi) = run_of(a, Quant::ForallSt);
    if xs.is_empty() {
        return mismatch("hgmp", path, "antecedent must start with forall-st");
    }
    if !phi.is_internal() || !psi.is_internal() {
        return Err(RewriteError::NonInternalMatrix {
            rule: "hgmp".into(),
            path: PathDisplay(path.to_vec()),
        });
    }
    let mut names = e.names(f);
    let (lb, lists) = list_block(&xs, &mut names);
    let ante = bounded(&xs, &lists, phi, &mut names, forall_in);
    let new = wrap(Quant::ExistsSt, &lb, Formula::imp(ante, (**psi).clone()));
    Ok(replace_at(f, path, new).unwrap())
}

/// HIP: `(imp (forall-st x) phi) (exists-st y..) Psi` becomes
/// `(exists-st ys..) (imp (forall-st x) phi) (exists y in ys..) Psi`.
pub fn hip_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    require_h(e, "hip")?;
    let Formula::Imp(a, b) = node(f, path)? else {
        return mismatch("hip", path, "expected an implication");
    };
    let (xs, phi) = run_of(a, Quant::ForallSt);
    let (ys, psi) = run_of(b, Quant::ExistsSt);
    if xs.is_empty() || ys.is_empty() {
        return mismatch(
            "hip",
            path,
            "expected (imp (forall-st x) ..) (exists-st y) ..)",
        );
    }
    if !phi.is_internal() {
        return Err(RewriteError::NonInternalMatrix {
            rule: "hip".into(),
            path: PathDisplay(path.to_vec()),
        });
    }
    let mut names = e.names(f);
    let (lb, lists) = list_block(&ys, &mut names);
    let cons = bounded(&ys, &lists, psi, &mut names, exists_in);
    let new = wrap(Quant::ExistsSt, &lb, Formula::imp((**a).clone(), cons));
    Ok(replace_at(f, path, new).unwrap())
}

/// Overspill, a one-way consequence:
/// `(forall-st (x r)) psi` yields `(exists (y r)) (and (not (st y)) psi[x:=y])`.
pub fn overspill_at(e: &Engine, f: &Formula, path: &[usize]) -> RResult<Formula> {
    let Formula::ForallSt(x, t, psi) = node(f, path)? else {
        return mismatch("overspill", path, "expected (forall-st x) psi");
    };
    if !psi.is_internal() {
        return mismatch("overspill", path, "body must be internal");
    }
    let y = e.names(f).fresh("y");
    let body = substitute(psi, x, &Term::var(&y));
    let new = Formula::Exists(
        y.clone(),
        t.clone(),
        Box::new(Formula::and(Formula::not(Formula::St(Term::var(&y))), body)),
    );
    Ok(replace_at(f, path, new).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::parse_document;
    use crate::syntax::print::print_formula;

    const PRE: &str = "(declare-atom phi (Nat Nat))\n(declare-atom psi (Nat))\n";

    fn setup(body: &str, mode: Mode) -> (Engine, Formula) {
        let d = parse_document(&format!("{PRE}{body}")).unwrap();
        (Engine::new(d.sig, mode), d.formula)
    }

    #[test]
    fn idealisation_shape() {
        let (e, f) = setup(
            "(forall (y Nat) (exists-st (x Nat) (atom phi x y)))",
            Mode::P,
        );
        let g = idealize_at(&e, &f, &[]).unwrap();
        assert_eq!(
            print_formula(&g),
            "(exists-st (xs (Seq Nat)) (forall (y Nat) (exists (i Nat) (and (le0 (succ i) (len xs)) (atom phi (idx xs i) y)))))"
        );
        assert!(matches!(
            idealize_at(&e, &g, &[]),
            Err(RewriteError::PatternMismatch { .. })
        ));
    }

    #[test]
    fn idealisation_guards() {
        let (e, f) = setup("(atom psi 0)", Mode::P);
        assert!(matches!(
            idealize_at(&e, &f, &[]),
            Err(RewriteError::PatternMismatch { .. })
        ));
        let (e, f) = setup(
            "(forall (y Nat) (exists-st (x Nat) (and (st y) (atom phi x y))))",
            Mode::P,
        );
        assert!(matches!(
            idealize_at(&e, &f, &[]),
            Err(RewriteError::NonInternalMatrix { .. })
        ));
        assert!(matches!(
            ncr_at(&e, &f, &[]),
            Err(RewriteError::WrongMode { .. })
        ));
        let h = Engine::new(e.sig.clone(), Mode::H);
        assert!(ncr_at(&h, &f, &[]).is_ok());
    }

    #[test]
    fn hac_identity_matrix() {
        let (e, f) = setup("(forall-st (x Nat) (exists-st (y Nat) (eq0 y x)))", Mode::P);
        let g = hac_at(&e, &f, &[]).unwrap();
        assert_eq!(
            print_formula(&g),
            "(exists-st (G (-> Nat (Seq Nat))) (forall-st (x Nat) (exists (i Nat) (and (le0 (succ i) (len (app G x))) (eq0 (idx (app G x) i) x)))))"
        );
        let (e, f) = setup("(exists-st (y Nat) (forall-st (x Nat) (eq0 y x)))", Mode::P);
        assert!(matches!(
            hac_at(&e, &f, &[]),
            Err(RewriteError::PatternMismatch { .. })
        ));
    }

    #[test]
    fn hgmp_and_hip() {
        let (e, f) = setup("(imp (forall-st (x Nat) (atom psi x)) (eq0 0 1))", Mode::H);
        let g = hgmp_at(&e, &f, &[]).unwrap();
        assert_eq!(
            print_formula(&g),
            "(exists-st (xs (Seq Nat)) (imp (forall (i Nat) (imp (le0 (succ i) (len xs)) (atom psi (idx xs i)))) (eq0 0 1)))"
        );
        let p = Engine::new(e.sig.clone(), Mode::P);
        assert!(matches!(
            hgmp_at(&p, &f, &[]),
            Err(RewriteError::WrongMode { .. })
        ));
        let (e, f) = setup(
            "(imp (forall-st (x Nat) (atom psi x)) (exists-st (y Nat) (atom phi y y)))",
            Mode::H,
        );
        let g = hip_at(&e, &f, &[]).unwrap();
        assert_eq!(
            print_formula(&g),
            "(exists-st (ys (Seq Nat)) (imp (forall-st (x Nat) (atom psi x)) (exists (i Nat) (and (le0 (succ i) (len ys)) (atom phi (idx ys i) (idx ys i))))))"
        );
    }

    #[test]
    fn overspill_instance() {
        let (e, f) = setup("(forall-st (n Nat) (le0 0 n))", Mode::P);
        let g = overspill_at(&e, &f, &[]).unwrap();
        assert_eq!(
            print_formula(&g),
            "(exists (y Nat) (and (not (st y)) (le0 0 y)))"
        );
        let (e, f) = setup("(exists-st (n Nat) (le0 0 n))", Mode::P);
        assert!(overspill_at(&e, &f, &[]).is_err());
    }
}
