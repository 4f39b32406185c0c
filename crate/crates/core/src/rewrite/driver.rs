//! The normalisation driver and the two closure constructions.

use crate::syntax::alpha::{substitute, NameSupply};
use crate::syntax::ast::*;
use crate::syntax::print::print_formula;
use crate::syntax::typing::ABS_ATOM;

use super::collapse::max_collapse_at;
use super::path::{all_paths, get_at, replace_at, Path, PathDisplay};
use super::trace::apply_rule;
use super::unfold::omega_bound_at;
use super::{mismatch, Engine, NormalForm, RResult, RewriteError, RewriteTrace};

const MAX_ROUNDS: usize = 64;

struct Run<'a> {
    e: &'a Engine,
    cur: Formula,
    trace: RewriteTrace,
}

impl Run<'_> {
    /// Applies a rule; records it only when the formula changed.
    fn step(&mut self, rule: &str, path: &[usize], args: &[&str]) -> RResult<bool> {
        let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
        let next = apply_rule(self.e, &self.cur, rule, path, &args)?;
        if next == self.cur {
            return Ok(false);
        }
        let before = std::mem::replace(&mut self.cur, next.clone());
        self.trace.push(rule, path, args, before, next);
        Ok(true)
    }

    fn prenex(&mut self, base: &[usize]) -> RResult<bool> {
        let args: &[&str] = if base.is_empty() { &[] } else { &["local"] };
        self.step("prenex", base, args)
    }

    fn paths_under(&self, base: &[usize]) -> Vec<Path> {
        let sub = get_at(&self.cur, base).unwrap();
        all_paths(sub)
            .into_iter()
            .map(|p| base.iter().copied().chain(p).collect())
            .collect()
    }

    /// Start of a maximal internal-universal run that Idealisation accepts,
    /// deepest first.
    fn idealize_site(&self, base: &[usize]) -> Option<Path> {
        let mut best: Option<Path> = None;
        for p in self.paths_under(base) {
            if !matches!(get_at(&self.cur, &p), Some(Formula::Forall(..))) {
                continue;
            }
            if p.len() > base.len() {
                let parent = get_at(&self.cur, &p[..p.len() - 1]).unwrap();
                if matches!(parent, Formula::Forall(..)) {
                    continue;
                }
            }
            if super::rules::idealize_at(self.e, &self.cur, &p).is_err() {
                continue;
            }
            if best.as_ref().is_none_or(|b| p.len() > b.len()) {
                best = Some(p);
            }
        }
        best
    }

    fn collapse(&mut self, path: &[usize]) -> RResult<()> {
        let c = max_collapse_at(self.e, &self.cur, path)?;
        let before = std::mem::replace(&mut self.cur, c.formula.clone());
        self.trace
            .push("max-collapse", path, vec![], before, c.formula);
        self.trace.steps.last_mut().unwrap().note = c.justification;
        Ok(())
    }

    fn collapse_greedy(&mut self, base: &[usize]) -> RResult<()> {
        for _ in 0..MAX_ROUNDS {
            let site = self.paths_under(base).into_iter().find(|p| {
                matches!(get_at(&self.cur, p), Some(Formula::ExistsSt(_, t, _)) if *t == Type::seq(Type::Nat))
                    && max_collapse_at(self.e, &self.cur, p).is_ok()
            });
            match site {
                Some(p) => self.collapse(&p)?,
                None => break,
            }
        }
        Ok(())
    }

    /// unfold, omega-bound, prenex, then Idealisation rounds and collapse.
    fn attempt(&mut self, base: &[usize]) -> RResult<()> {
        self.step("unfold", base, &[])?;
        for _ in 0..MAX_ROUNDS {
            let site = self
                .paths_under(base)
                .into_iter()
                .find(|p| omega_bound_at(self.e, &self.cur, p).is_ok());
            match site {
                Some(p) => {
                    self.step("omega-bound", &p, &[])?;
                }
                None => break,
            }
        }
        self.prenex(base)?;
        for _ in 0..MAX_ROUNDS {
            let Some(p) = self.idealize_site(base) else {
                break;
            };
            self.step("idealize", &p, &[])?;
            self.prenex(base)?;
            // collapse before the next round nests the list inside another
            self.collapse_greedy(base)?;
        }
        Ok(())
    }

    fn nf_at(&self, base: &[usize]) -> Option<NormalForm> {
        NormalForm::from_formula(get_at(&self.cur, base)?)
    }

    /// Normalises the subformula at `base`. An implication that does not
    /// normalise directly is handled side by side and then combined.
    fn to_nf(&mut self, base: &[usize]) -> RResult<()> {
        let saved_cur = self.cur.clone();
        let saved_len = self.trace.len();
        let direct = self.attempt(base);
        if direct.is_ok() && self.nf_at(base).is_some() {
            return Ok(());
        }
        let err = match direct {
            Err(err) => err,
            Ok(()) => blocking(&self.cur, base),
        };
        if !matches!(get_at(&saved_cur, base), Some(Formula::Imp(..))) {
            return Err(err);
        }
        self.cur = saved_cur;
        self.trace.steps.truncate(saved_len);
        let mut left = base.to_vec();
        left.push(0);
        let mut right = base.to_vec();
        right.push(1);
        let sides = self.to_nf(&left).and_then(|_| self.to_nf(&right));
        if sides.is_err() {
            return Err(err);
        }
        self.step("nf-implication", base, &[])?;
        Ok(())
    }
}

/// First st-family node inside the part of the subformula at `base` that
/// is not a normal-form prefix.
fn blocking(f: &Formula, base: &[usize]) -> RewriteError {
    let sub = get_at(f, base).unwrap();
    let mut path = base.to_vec();
    let mut cur = sub;
    while let Formula::ForallSt(_, _, b) = cur {
        cur = b;
        path.push(0);
    }
    while let Formula::ExistsSt(_, _, b) = cur {
        cur = b;
        path.push(0);
    }
    for p in all_paths(cur) {
        let node = get_at(cur, &p).unwrap();
        let own = match node {
            Formula::St(_)
            | Formula::ForallSt(..)
            | Formula::ExistsSt(..)
            | Formula::Approx(..)
            | Formula::ForallOmega(..)
            | Formula::ForallInf(..) => true,
            _ => false,
        };
        if own {
            let mut full = path.clone();
            full.extend(p);
            return RewriteError::NotInFragment {
                path: PathDisplay(full),
                node: print_formula(node),
            };
        }
    }
    RewriteError::NotInFragment {
        path: PathDisplay(path),
        node: print_formula(cur),
    }
}

/// Runs the whole pipeline and returns the normal form with its trace.
pub fn normalize_to_normal_form(e: &Engine, f: &Formula) -> RResult<(NormalForm, RewriteTrace)> {
    let mut run = Run {
        e,
        cur: f.clone(),
        trace: RewriteTrace::new(),
    };
    run.to_nf(&[])?;
    let nf = run.nf_at(&[]).expect("to_nf leaves a normal form");
    Ok((nf, run.trace))
}

/// The implication rule at a position: `(imp A B)` with both sides normal
/// forms becomes the combined normal form of [`nf_implication`].
pub fn nf_implication_at(f: &Formula, path: &[usize], sig: &Signature) -> RResult<Formula> {
    let Some(Formula::Imp(a, b)) = get_at(f, path) else {
        return mismatch("nf-implication", path, "expected an implication");
    };
    let (Some(na), Some(nb)) = (NormalForm::from_formula(a), NormalForm::from_formula(b)) else {
        return mismatch("nf-implication", path, "both sides must be normal forms");
    };
    let mut names = NameSupply::for_formula(f);
    for (v, _) in &sig.vars {
        names.reserve(v);
    }
    let out = combine(&na, &nb, &mut names);
    Ok(replace_at(f, path, out.to_formula()).unwrap())
}

/// `(forall-st x)(exists-st y) phi -> (forall-st z)(exists-st w) psi` as
/// `(forall-st zeta, z)(exists-st w, x) [phi(x, zeta x) -> psi(z, w)]`.
pub fn nf_implication(a: &NormalForm, b: &NormalForm) -> NormalForm {
    let mut names = NameSupply::for_formula(&Formula::imp(a.to_formula(), b.to_formula()));
    combine(a, b, &mut names)
}

fn combine(a: &NormalForm, b: &NormalForm, names: &mut NameSupply) -> NormalForm {
    let xs: Vec<Type> = a.univ.iter().map(|(_, t)| t.clone()).collect();
    let mut phi = a.matrix.clone();
    let mut zetas = Vec::new();
    for (y, ty) in &a.exist {
        let z = names.fresh("zeta");
        let app = Term::apps(Term::var(&z), a.univ.iter().map(|(x, _)| Term::var(x)));
        phi = substitute(&phi, y, &app);
        zetas.push((z, Type::curried(&xs, ty.clone())));
    }
    NormalForm {
        univ: zetas.into_iter().chain(b.univ.iter().cloned()).collect(),
        exist: b
            .exist
            .iter()
            .cloned()
            .chain(a.univ.iter().cloned())
            .collect(),
        matrix: Formula::imp(phi, b.matrix.clone()),
    }
}

/// `(forall-inf (e)) (forall-st x)(exists-st y) phi` with `phi` internal,
/// brought to normal form through Idealisation and a collapse of the bound
/// list only. Further collapses are left to the caller.
pub fn nf_forall_infinitesimal(e: &Engine, f: &Formula) -> RResult<(NormalForm, RewriteTrace)> {
    let Formula::ForallInf(_, body) = f else {
        return mismatch("nf-forall-inf", &[], "expected (forall-inf (e) ..)");
    };
    if NormalForm::from_formula(body).is_none() {
        return mismatch(
            "nf-forall-inf",
            &[0],
            "body must be (forall-st x)(exists-st y) phi with phi internal",
        );
    }
    let mut run = Run {
        e,
        cur: f.clone(),
        trace: RewriteTrace::new(),
    };
    run.step("unfold", &[], &[])?;
    run.prenex(&[])?;
    let site = run
        .idealize_site(&[])
        .ok_or_else(|| RewriteError::NotInFragment {
            path: PathDisplay(vec![]),
            node: print_formula(&run.cur),
        })?;
    run.step("idealize", &site, &[])?;
    run.prenex(&[])?;
    let bound_list = all_paths(&run.cur)
        .into_iter()
        .find(|p| match get_at(&run.cur, p) {
            Some(Formula::ExistsSt(l, t, _)) if *t == Type::seq(Type::Nat) => {
                uses_in_abs(&run.cur, l)
            }
            _ => false,
        });
    if let Some(p) = bound_list {
        run.collapse(&p)?;
    }
    match run.nf_at(&[]) {
        Some(nf) => Ok((nf, run.trace)),
        None => Err(blocking(&run.cur, &[])),
    }
}

fn uses_in_abs(f: &Formula, list: &str) -> bool {
    if let Formula::Atom(n, args) = f {
        if n == ABS_ATOM {
            return args
                .iter()
                .any(|a| matches!(a, Term::Idx(l, _) if **l == Term::var(list)));
        }
    }
    f.children().into_iter().any(|c| uses_in_abs(c, list))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{replay, Mode};
    use crate::syntax::parse::parse_document;

    fn doc(text: &str) -> (Engine, Formula) {
        let d = parse_document(text).unwrap();
        (Engine::new(d.sig, Mode::P), d.formula)
    }

    #[test]
    fn internal_input_has_empty_blocks() {
        let (e, f) = doc("(forall (x Nat) (le0 x x))");
        let (nf, tr) = normalize_to_normal_form(&e, &f).unwrap();
        assert!(nf.univ.is_empty() && nf.exist.is_empty());
        assert_eq!(nf.matrix, f);
        assert!(tr.is_empty());
    }

    #[test]
    fn implication_between_normal_forms() {
        let (e, f) = doc(
            "(declare-atom phi (Nat Nat))\n(declare-atom psi (Nat Nat))\n(imp (forall-st (x Nat) (exists-st (y Nat) (atom phi x y))) (forall-st (z Nat) (exists-st (w Nat) (atom psi z w))))",
        );
        let (nf, tr) = normalize_to_normal_form(&e, &f).unwrap();
        assert_eq!(
            nf.to_string(),
            "(forall-st (zeta (-> Nat Nat)) (forall-st (z Nat) (exists-st (w Nat) (exists-st (x Nat) (imp (atom phi x (app zeta x)) (atom psi z w))))))"
        );
        assert_eq!(tr.rules(), vec!["nf-implication"]);
        assert_eq!(replay(&e, &tr).unwrap().unwrap(), nf.to_formula());
    }

    #[test]
    fn degenerate_blocks() {
        let (_, f) = doc(
            "(declare-atom phi (Nat Nat))\n(declare-atom psi (Nat))\n(imp (forall-st (x Nat) (exists-st (y Nat) (atom phi x y))) (atom psi 0))",
        );
        let Formula::Imp(a, b) = &f else { panic!() };
        let na = NormalForm::from_formula(a).unwrap();
        let nb = NormalForm::from_formula(b).unwrap();
        let out = nf_implication(&na, &nb);
        assert_eq!(
            out.to_string(),
            "(forall-st (zeta (-> Nat Nat)) (exists-st (x Nat) (imp (atom phi x (app zeta x)) (atom psi 0))))"
        );
        let out = nf_implication(&nb, &na);
        assert_eq!(
            out.to_string(),
            "(forall-st (x Nat) (exists-st (y Nat) (imp (atom psi 0) (atom phi x y))))"
        );
    }

    #[test]
    fn outside_fragment_reports_node() {
        let (e, f) = doc("(declare-atom p (Nat))\n(or (st 0) (atom p 0))");
        match normalize_to_normal_form(&e, &f) {
            Err(RewriteError::NotInFragment { path, node }) => {
                assert_eq!(path.to_string(), "0");
                assert_eq!(node, "(st 0)");
            }
            other => panic!("{other:?}"),
        }
    }
}
