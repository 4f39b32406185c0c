//! Script execution: realizers folded over the steps.

use std::collections::{BTreeMap, HashSet};

use crate::rewrite::collapse::{check_occurrences, max_collapse_at};
use crate::rewrite::path::{all_paths, get_at, PathDisplay};
use crate::rewrite::trace::apply_rule;
use crate::rewrite::{nf_implication, Engine, NormalForm, RewriteError, RewriteTrace};
use crate::syntax::alpha::{alpha_eq, alpha_eq_blocks, free_vars_term, fresh, subst_term};
use crate::syntax::ast::*;
use crate::syntax::print::{print_term, print_type};
use crate::syntax::typing::{infer_type, Ctx};

use super::oracle::{guard, oracle_parameter, oracle_type, oracle_var};
use super::script::{AxiomInstance, Oracle, ProofScript, ScriptStep};
use super::terms::{apply_vars, flat_apply, map_max};
use super::{
    close_witness, show, strip_st, ExtractError, ExtractedWitness, ExtractionResult, Witness,
    XResult,
};

type Block = Vec<(String, Type)>;

/// The witness environment while a script runs.
pub struct ExtractState<'a> {
    pub engine: Engine,
    script: &'a ProofScript,
    pub cur: Formula,
    /// Open witnesses, over the standard universals before their binder.
    pub wit: BTreeMap<String, Witness>,
    /// Standard objects built by axiom steps, open over standard universals.
    pub store: BTreeMap<String, Term>,
    /// Oracles assumed so far, in order of first use.
    pub oracles_used: Vec<Oracle>,
    pub trace: RewriteTrace,
    pub notes: Vec<String>,
    index: usize,
}

/// Leading run of standard quantifiers.
fn st_prefix(f: &Formula) -> Vec<(Quant, String, Type)> {
    let mut out = Vec::new();
    let mut cur = f;
    while let Some((q, x, t, b)) = cur.as_quant() {
        if !q.is_st() {
            break;
        }
        out.push((q, x.to_string(), t.clone()));
        cur = b;
    }
    out
}

impl<'a> ExtractState<'a> {
    pub fn new(script: &'a ProofScript, start: Formula) -> ExtractState<'a> {
        ExtractState {
            engine: Engine::new(script.sig.clone(), script.mode),
            script,
            cur: start,
            wit: BTreeMap::new(),
            store: BTreeMap::new(),
            oracles_used: vec![],
            trace: RewriteTrace::new(),
            notes: Vec::new(),
            index: 0,
        }
    }

    fn fail<T>(&self, detail: impl Into<String>) -> XResult<T> {
        Err(ExtractError::StepInapplicable {
            index: self.index,
            detail: detail.into(),
        })
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes
            .push(format!("step {}: {}", self.index, s.into()));
    }

    /// Standard universals before the existential `y` of the prefix.
    fn univ_before(&self, y: &str) -> Option<Block> {
        let mut univ = Vec::new();
        for (q, x, t) in st_prefix(&self.cur) {
            match q {
                Quant::ForallSt => univ.push((x, t)),
                _ if x == y => return Some(univ),
                _ => {}
            }
        }
        None
    }

    fn all_univ(&self) -> Block {
        st_prefix(&self.cur)
            .into_iter()
            .filter(|(q, _, _)| *q == Quant::ForallSt)
            .map(|(_, x, t)| (x, t))
            .collect()
    }

    fn exist_type(&self, y: &str) -> Option<Type> {
        st_prefix(&self.cur)
            .into_iter()
            .find(|(q, x, _)| *q == Quant::ExistsSt && x == y)
            .map(|(_, _, t)| t)
    }

    fn ctx(&self, univ: &Block) -> Ctx {
        let mut c = Ctx::from_sig(&self.script.sig);
        for o in &self.oracles_used {
            c.push(oracle_var(*o), oracle_type(*o));
        }
        for (x, t) in univ {
            c.push(x, t.clone());
        }
        c
    }

    /// Replaces store names by their terms; standard universals win.
    fn resolve(&self, t: &Term, univ: &Block) -> Term {
        let mut out = t.clone();
        for v in free_vars_term(t) {
            if univ.iter().any(|(x, _)| *x == v) {
                continue;
            }
            if let Some(s) = self.store.get(&v) {
                out = subst_term(&out, &v, s);
            }
        }
        out
    }

    fn type_of(&self, t: &Term, univ: &Block) -> XResult<Type> {
        infer_type(t, &self.ctx(univ))
            .map_err(|e| ExtractError::IllTypedInstantiation(format!("{}: {e}", print_term(t))))
    }

    /// Reads a term as a witness for a binder of type `ty`: the type itself
    /// or its list, either open over `univ` or as a function of it.
    fn classify(&self, t: &Term, ty: &Type, univ: &Block) -> XResult<Witness> {
        let got = self.type_of(t, univ)?;
        let seq = Type::seq(ty.clone());
        if got == *ty {
            return Ok(Witness::single(t.clone()));
        }
        if got == seq {
            return Ok(Witness::list(t.clone()));
        }
        let args: Vec<Type> = univ.iter().map(|(_, t)| t.clone()).collect();
        let names: Vec<String> = univ.iter().map(|(x, _)| x.clone()).collect();
        if !args.is_empty() {
            if got == Type::curried(&args, ty.clone()) {
                return Ok(Witness::single(apply_vars(t, &names)));
            }
            if got == Type::curried(&args, seq.clone()) {
                return Ok(Witness::list(apply_vars(t, &names)));
            }
        }
        Err(ExtractError::IllTypedInstantiation(format!(
            "{} has type {}, expected {} or {} (possibly over the standard universals)",
            print_term(t),
            print_type(&got),
            print_type(ty),
            print_type(&seq)
        )))
    }

    /// Every witnessed binder is a prefix existential whose witness only
    /// mentions the standard universals before it.
    fn validate(&self) -> XResult<()> {
        for (y, w) in &self.wit {
            let Some(univ) = self.univ_before(y) else {
                return self.fail(format!(
                    "witnessed binder `{y}` is no longer in the standard prefix"
                ));
            };
            for v in free_vars_term(&w.term) {
                let ok = univ.iter().any(|(x, _)| *x == v)
                    || self.is_oracle_var(&v)
                    || self.script.standard.contains(&v);
                if !ok {
                    return self.fail(format!(
                        "witness of `{y}` mentions `{v}`, which is not a standard universal before it"
                    ));
                }
            }
        }
        Ok(())
    }

    fn is_oracle_var(&self, v: &str) -> bool {
        self.oracles_used.iter().any(|o| oracle_var(*o) == v)
    }

    fn step(&mut self, s: &ScriptStep) -> XResult<()> {
        match s {
            ScriptStep::Rewrite { rule, path, args } => self.rewrite(rule, path, args),
            ScriptStep::Axiom(a) => realizer_for_axiom(self, a),
            ScriptStep::ModusPonens(l) => self.modus_ponens(l),
            ScriptStep::OracleUse(o) => {
                if !self.script.oracles.contains(o) {
                    return Err(ExtractError::OracleNotDeclared(o.name().into()));
                }
                if !self.oracles_used.contains(o) {
                    self.oracles_used.push(*o);
                }
                self.note(format!(
                    "oracle {} assumed as `{}`",
                    o.name(),
                    oracle_var(*o)
                ));
                Ok(())
            }
            ScriptStep::WitnessSupply { binder, term } => self.supply(binder, term),
        }
    }

    fn rewrite(&mut self, rule: &str, path: &[usize], args: &[String]) -> XResult<()> {
        let before = self.cur.clone();
        let (after, note) = if rule == "max-collapse" {
            max_collapse_at(&self.engine, &before, path).map(|c| (c.formula, c.justification))
        } else {
            apply_rule(&self.engine, &before, rule, path, args).map(|f| (f, vec![]))
        }
        .map_err(|e| match e {
            RewriteError::WrongMode { .. } => ExtractError::Rewrite(e),
            other => ExtractError::StepInapplicable {
                index: self.index,
                detail: other.to_string(),
            },
        })?;
        match rule {
            "hac" => self.transfer_hac(&before, &after, path),
            "max-collapse" => self.transfer_collapse(&before, &after, path),
            _ => {}
        }
        self.cur = after.clone();
        self.trace.push(rule, path, args.to_vec(), before, after);
        self.trace.steps.last_mut().unwrap().note = note;
        self.note(format!("{rule} @ {}", PathDisplay(path.to_vec())));
        Ok(())
    }

    /// `G := lam x.. <witness of y>` for each chosen `y`.
    fn transfer_hac(&mut self, before: &Formula, after: &Formula, path: &[usize]) {
        let (pre, _) = get_at(before, path).unwrap().split_prefix();
        let xs: Block = pre
            .iter()
            .take_while(|(q, _, _)| *q == Quant::ForallSt)
            .map(|(_, x, t)| (x.clone(), t.clone()))
            .collect();
        let ys: Block = pre
            .iter()
            .skip(xs.len())
            .take_while(|(q, _, _)| *q == Quant::ExistsSt)
            .map(|(_, x, t)| (x.clone(), t.clone()))
            .collect();
        let (post, _) = get_at(after, path).unwrap().split_prefix();
        for ((y, ty), (_, g, _)) in ys.iter().zip(post.iter()) {
            if let Some(w) = self.wit.remove(y) {
                let term = Term::lams(&xs, w.as_list(ty));
                self.wit.insert(g.clone(), Witness::single(term));
                self.note(format!("hac: witness of `{y}` curried into `{g}`"));
            }
        }
    }

    fn transfer_collapse(&mut self, before: &Formula, after: &Formula, path: &[usize]) {
        let (Some(Formula::ExistsSt(l, _, _)), Some(Formula::ExistsSt(n, _, _))) =
            (get_at(before, path), get_at(after, path))
        else {
            return;
        };
        if let Some(w) = self.wit.remove(l) {
            let nw = if w.single {
                Witness::single(Term::max_nat(w.term))
            } else {
                Witness::list(map_max(&w.term))
            };
            self.wit.insert(n.clone(), nw);
            self.note(format!(
                "max-collapse: `{n}` is the maximum of the candidates for `{l}`"
            ));
        }
    }

    fn supply(&mut self, y: &str, t: &Term) -> XResult<()> {
        let Some(univ) = self.univ_before(y) else {
            return self.fail(format!(
                "`{y}` is not an existential of the standard prefix"
            ));
        };
        let ty = self.exist_type(y).unwrap();
        let t = self.resolve(t, &univ);
        let w = self.classify(&t, &ty, &univ)?;
        if self.wit.contains_key(y) {
            self.note(format!("supply replaces the witness of `{y}`"));
        }
        self.note(format!(
            "supply {} witness for `{y}`: {}",
            w.kind(),
            print_term(&w.term)
        ));
        self.wit.insert(y.to_string(), w);
        Ok(())
    }

    /// Named object as a list of candidates: a stored object, or a standard
    /// universal `x` as `<x>`.
    fn as_candidates(&self, name: &str, univ: &Block) -> XResult<(Term, Type)> {
        if let Some(t) = self.store.get(name) {
            return match self.type_of(t, univ)? {
                Type::Seq(e) => Ok((t.clone(), *e)),
                other => Err(ExtractError::IllTypedInstantiation(format!(
                    "`{name}` has type {}, not a list of standard candidates",
                    print_type(&other)
                ))),
            };
        }
        if let Some((_, ty)) = univ.iter().find(|(x, _)| x == name) {
            return Ok((Term::singleton(Term::var(name), ty.clone()), ty.clone()));
        }
        Err(ExtractError::IllTypedInstantiation(format!(
            "`{name}` is neither a stored standard object nor a standard universal"
        )))
    }

    fn modus_ponens(&mut self, lemma: &str) -> XResult<()> {
        let Some(p) = self.script.premises.iter().find(|p| p.name == lemma) else {
            return self.fail(format!("no premise named `{lemma}`"));
        };
        let Formula::Imp(a, b) = &p.formula else {
            return self.fail(format!("premise `{lemma}` is not an implication"));
        };
        let (Some(na), Some(nb)) = (NormalForm::from_formula(a), NormalForm::from_formula(b))
        else {
            return self.fail(format!("both sides of `{lemma}` must be normal forms"));
        };
        let Some(cur) = NormalForm::from_formula(&self.cur) else {
            return self.fail("current formula is not a normal form");
        };
        if !alpha_eq(&self.cur, a) {
            return self.fail(format!(
                "current formula is not the antecedent of `{lemma}`: {}",
                show(a)
            ));
        }
        // zeta_j := lam x.. s_j, renamed onto the antecedent's binders
        let combined = nf_implication(&na, &nb);
        let mut zetas = Vec::new();
        for (j, (y, _)) in cur.exist.iter().enumerate() {
            let Some(w) = self.wit.get(y) else {
                return Err(ExtractError::MissingWitness(y.clone()));
            };
            if !w.single {
                return self.fail(format!(
                    "modus ponens needs a single witness for `{y}`; apply (axiom max {y}) first"
                ));
            }
            let s = rename_block(&w.term, &cur.univ, &na.univ);
            zetas.push((combined.univ[j].0.clone(), Term::lams(&na.univ, s)));
        }
        let names: Vec<String> = combined.univ.iter().map(|(x, _)| x.clone()).collect();
        let mut wit = BTreeMap::new();
        for (w, _) in &nb.exist {
            let Some((_, pw)) = p.witnesses.iter().find(|(b, _)| b == w) else {
                return Err(ExtractError::MissingWitness(w.clone()));
            };
            let mut t = apply_vars(&pw.term, &names);
            for (z, s) in &zetas {
                t = subst_term(&t, z, s);
            }
            wit.insert(
                w.clone(),
                Witness {
                    term: t,
                    single: pw.single,
                },
            );
        }
        self.cur = (**b).clone();
        self.wit = wit;
        self.note(format!(
            "mp with `{lemma}`: antecedent witnesses fed to its zeta block"
        ));
        Ok(())
    }
}

/// Renames the binders of `from` to those of `to`, positionally.
fn rename_block(t: &Term, from: &Block, to: &Block) -> Term {
    let mut used: HashSet<String> = free_vars_term(t).into_iter().collect();
    used.extend(from.iter().chain(to).map(|(x, _)| x.clone()));
    let mut out = t.clone();
    let mut temps = Vec::new();
    for (x, _) in from {
        let tmp = fresh(&format!("{x}_"), &used);
        used.insert(tmp.clone());
        out = subst_term(&out, x, &Term::var(&tmp));
        temps.push(tmp);
    }
    for (tmp, (y, _)) in temps.iter().zip(to) {
        out = subst_term(&out, tmp, &Term::var(y));
    }
    out
}

/// Applies one axiom step to the witness environment.
pub fn realizer_for_axiom(st: &mut ExtractState, a: &AxiomInstance) -> XResult<()> {
    match a {
        AxiomInstance::StClosed { name, term } => {
            let t = st.resolve(term, &vec![]);
            if let Some(v) = free_vars_term(&t).into_iter().next() {
                return Err(ExtractError::IllTypedInstantiation(format!(
                    "st-closed needs a closed term; `{v}` is free"
                )));
            }
            let ty = st.type_of(&t, &vec![])?;
            st.store
                .insert(name.clone(), Term::singleton(t.clone(), ty));
            st.note(format!("st({}) stored as `{name}`", print_term(&t)));
            Ok(())
        }
        AxiomInstance::StApp { name, fun, args } => {
            let univ = st.all_univ();
            let (mut acc, mut ty) = st.as_candidates(fun, &univ)?;
            for x in args {
                let (xs, xty) = st.as_candidates(x, &univ)?;
                let Type::Arrow(dom, cod) = ty.clone() else {
                    return Err(ExtractError::IllTypedInstantiation(format!(
                        "`{fun}` applied to too many arguments"
                    )));
                };
                if *dom != xty {
                    return Err(ExtractError::IllTypedInstantiation(format!(
                        "argument `{x}` has type {}, expected {}",
                        print_type(&xty),
                        print_type(&dom)
                    )));
                }
                acc = flat_apply(&acc, &xs, &cod);
                ty = *cod;
            }
            st.store.insert(name.clone(), acc);
            st.note(format!(
                "st-app: `{name}` collects {fun} applied to {} over all candidates",
                args.join(", ")
            ));
            Ok(())
        }
        AxiomInstance::IaSt { name, base, step } => {
            let univ = st.all_univ();
            let base = st.resolve(base, &univ);
            let step = st.resolve(step, &univ);
            let bt = st.type_of(&base, &univ)?;
            if !matches!(bt, Type::Seq(_)) {
                return Err(ExtractError::IllTypedInstantiation(format!(
                    "ia-st base must be a list of candidates, found {}",
                    print_type(&bt)
                )));
            }
            let want = Type::arrow(Type::Nat, Type::arrow(bt.clone(), bt.clone()));
            let stt = st.type_of(&step, &univ)?;
            if stt != want {
                return Err(ExtractError::IllTypedInstantiation(format!(
                    "ia-st step has type {}, expected {}",
                    print_type(&stt),
                    print_type(&want)
                )));
            }
            let mut used: HashSet<String> = free_vars_term(&base).into_iter().collect();
            used.extend(free_vars_term(&step));
            let n = fresh("n", &used);
            let rec = Term::Rec(bt, Box::new(base), Box::new(step), Box::new(Term::var(&n)));
            st.store.insert(name.clone(), Term::lam(&n, Type::Nat, rec));
            st.note(format!("ia-st: `{name}` iterates the step from the base"));
            Ok(())
        }
        AxiomInstance::Schema { rule, path } => st.rewrite(rule, path, &[]),
        AxiomInstance::QfAc(f) => {
            let (pre, m) = f.split_prefix();
            let shape = pre.iter().all(|(q, _, _)| !q.is_st())
                && pre.first().is_some_and(|(q, _, _)| *q == Quant::Forall)
                && pre.iter().any(|(q, _, _)| *q == Quant::Exists);
            let qf = all_paths(m)
                .iter()
                .all(|p| get_at(m, p).unwrap().as_quant().is_none())
                && m.is_internal();
            if !shape || !qf {
                return Err(ExtractError::IllTypedInstantiation(
                    "qf-ac needs (forall x..)(exists y..) phi with phi quantifier-free and internal".into(),
                ));
            }
            st.note(format!("qf-ac instance {}", show(f)));
            Ok(())
        }
        AxiomInstance::Max(y) => {
            let Some(ty) = st.exist_type(y) else {
                return st.fail(format!(
                    "`{y}` is not an existential of the standard prefix"
                ));
            };
            if ty != Type::Nat {
                return st.fail(format!(
                    "max needs a Nat binder, `{y}` has type {}",
                    print_type(&ty)
                ));
            }
            let Some(w) = st.wit.get(y).cloned() else {
                return Err(ExtractError::MissingWitness(y.clone()));
            };
            if w.single {
                st.note(format!("max: witness of `{y}` is already single"));
                return Ok(());
            }
            let body = find_exists_st(&st.cur, y).unwrap();
            let mut just = Vec::new();
            if let Err(d) = check_occurrences(&st.engine, body, &Term::var(y), true, &mut just) {
                return st.fail(format!("max of `{y}` not licensed: {d}"));
            }
            st.wit
                .insert(y.clone(), Witness::single(Term::max_nat(w.term)));
            st.note(format!(
                "max: `{y}` takes the largest candidate ({})",
                just.join("; ")
            ));
            Ok(())
        }
        AxiomInstance::StLift(f) => {
            let Some(nf) = NormalForm::from_formula(f) else {
                return st.fail("st-lift needs a normal form");
            };
            let mut closed = Vec::new();
            let names: Vec<String> = nf.univ.iter().map(|(x, _)| x.clone()).collect();
            for (y, ty) in &nf.exist {
                let t = match st.store.get(y) {
                    Some(Term::Cons(h, tl)) if matches!(**tl, Term::Nil(_)) => (**h).clone(),
                    _ => {
                        return st.fail(format!("no standard object <s> stored under `{y}`"));
                    }
                };
                if !free_vars_term(&t).is_empty() {
                    return Err(ExtractError::OpenWitness(y.clone()));
                }
                let got = st.type_of(&t, &vec![])?;
                let args: Vec<Type> = nf.univ.iter().map(|(_, t)| t.clone()).collect();
                let single = if got == Type::curried(&args, ty.clone()) {
                    true
                } else if got == Type::curried(&args, Type::seq(ty.clone())) {
                    false
                } else {
                    return Err(ExtractError::IllTypedInstantiation(format!(
                        "object for `{y}` has type {}",
                        print_type(&got)
                    )));
                };
                closed.push((y.clone(), Witness { term: t, single }));
            }
            let stripped = strip_st(&nf, &closed)?;
            if !alpha_eq(&stripped, &st.cur) {
                return st.fail(format!(
                    "the normal form strips to {}, not to the current sentence",
                    show(&stripped)
                ));
            }
            st.wit = closed
                .into_iter()
                .map(|(y, w)| {
                    let term = apply_vars(&w.term, &names);
                    (
                        y,
                        Witness {
                            term,
                            single: w.single,
                        },
                    )
                })
                .collect();
            st.cur = f.clone();
            st.note("st-lift: each witness is standard, and so is its value at standard arguments");
            Ok(())
        }
    }
}

fn find_exists_st<'f>(f: &'f Formula, y: &str) -> Option<&'f Formula> {
    let mut cur = f;
    while let Some((q, x, _, b)) = cur.as_quant() {
        if q == Quant::ExistsSt && x == y {
            return Some(b);
        }
        cur = b;
    }
    None
}

/// Runs a script from its start formula to its conclusion.
pub fn run_script(s: &ProofScript) -> XResult<ExtractionResult> {
    let Some(start) = s.start.clone() else {
        return Err(ExtractError::Script("script has no start formula".into()));
    };
    let mut st = ExtractState::new(s, start);
    for (k, step) in s.steps.iter().enumerate() {
        st.index = k + 1;
        st.step(step)?;
        st.validate()?;
    }
    if !alpha_eq_blocks(&st.cur, &s.conclusion) {
        return Err(ExtractError::ConclusionMismatch {
            got: show(&st.cur),
            want: show(&s.conclusion),
        });
    }
    let Some(nf) = NormalForm::from_formula(&st.cur) else {
        return Err(ExtractError::ConclusionMismatch {
            got: show(&st.cur),
            want: "a normal form".into(),
        });
    };
    let mut witnesses = Vec::new();
    for (y, ty) in &nf.exist {
        let w = st
            .wit
            .get(y)
            .ok_or_else(|| ExtractError::MissingWitness(y.clone()))?;
        let c = close_witness(w, &nf.univ);
        for v in free_vars_term(&c.term) {
            if !st.is_oracle_var(&v) && !s.standard.contains(&v) {
                return Err(ExtractError::OpenWitness(y.clone()));
            }
        }
        witnesses.push(ExtractedWitness {
            binder: y.clone(),
            ty: ty.clone(),
            witness: c,
        });
    }
    let pairs: Vec<(String, Witness)> = witnesses
        .iter()
        .map(|w| (w.binder.clone(), w.witness.clone()))
        .collect();
    let body = strip_st(&nf, &pairs)?;
    let internal_sentence = guard(body, &st.oracles_used);
    let oracle_parameters = st
        .oracles_used
        .iter()
        .map(|o| oracle_parameter(*o))
        .collect();
    debug_assert!(internal_sentence.is_internal());
    Ok(ExtractionResult {
        name: s.name.clone(),
        sig: s.sig.clone(),
        nf,
        witnesses,
        internal_sentence,
        oracle_parameters,
        provenance: st.trace,
        notes: st.notes,
        oracle_approximated: false,
        oracle_impl: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{normalize, Value};
    use crate::extract::script::parse_script;
    use crate::rewrite::Mode;
    use crate::syntax::print::print_formula;

    const PRE: &str = "(declare-sort Real)\n(declare-atom lt-inv-dist (Real Real Nat) :decidable :antitone 2)\n(declare-var f (-> Real Real))\n";

    fn script(body: &str) -> ProofScript {
        parse_script(&format!("{PRE}{body}"), &Signature::default()).unwrap()
    }

    fn store_value(s: &ProofScript, name: &str) -> Value {
        let mut st = ExtractState::new(s, s.start.clone().unwrap());
        for (k, step) in s.steps.iter().enumerate() {
            st.index = k + 1;
            st.step(step).unwrap();
        }
        normalize(&st.store[name]).unwrap()
    }

    #[test]
    fn st_closed_is_singleton() {
        let s = script("(start (eq0 0 0))\n(axiom st-closed c (lam (k Nat) (succ k)))\n(axiom st-app d c c2)\n(conclusion (eq0 0 0))");
        // st-app over an unknown name is rejected
        let mut st = ExtractState::new(&s, s.start.clone().unwrap());
        st.index = 1;
        st.step(&s.steps[0]).unwrap();
        assert_eq!(
            print_term(&st.store["c"]),
            "(cons (lam (k Nat) (succ k)) (nil (-> Nat Nat)))"
        );
        st.index = 2;
        assert!(matches!(
            st.step(&s.steps[1]),
            Err(ExtractError::IllTypedInstantiation(_))
        ));
    }

    #[test]
    fn st_app_flattens_pointwise() {
        let s = script("(start (eq0 0 0))\n(axiom st-closed g (lam (k Nat) (succ k)))\n(axiom st-closed x 3)\n(axiom ia-st two (cons 5 (nil Nat)) (lam (n Nat) (lam (l (Seq Nat)) (cons n l))))\n(axiom st-app h g x)\n(conclusion (eq0 0 0))");
        assert_eq!(store_value(&s, "h").to_string(), "(cons 4 (nil Nat))");
        let s = script("(start (eq0 0 0))\n(axiom st-closed g (lam (k Nat) (succ k)))\n(axiom st-app h g pair)\n(conclusion (eq0 0 0))");
        // a two-element candidate list through the store
        let mut st = ExtractState::new(&s, s.start.clone().unwrap());
        st.store.insert(
            "pair".into(),
            Term::list(vec![Term::numeral(2), Term::numeral(7)], Type::Nat),
        );
        for (k, step) in s.steps.iter().enumerate() {
            st.index = k + 1;
            st.step(step).unwrap();
        }
        assert_eq!(
            normalize(&st.store["h"]).unwrap().to_string(),
            "(cons 3 (cons 8 (nil Nat)))"
        );
    }

    #[test]
    fn ia_st_at_zero_is_base() {
        let s = script("(start (eq0 0 0))\n(axiom ia-st it (cons 5 (nil Nat)) (lam (n Nat) (lam (l (Seq Nat)) (cons n l))))\n(conclusion (eq0 0 0))");
        let mut st = ExtractState::new(&s, s.start.clone().unwrap());
        st.index = 1;
        st.step(&s.steps[0]).unwrap();
        let at = |k: u64| normalize(&Term::app(st.store["it"].clone(), Term::numeral(k))).unwrap();
        assert_eq!(at(0).to_string(), "(cons 5 (nil Nat))");
        assert_eq!(at(2).to_string(), "(cons 1 (cons 0 (cons 5 (nil Nat))))");
    }

    #[test]
    fn empty_script_on_internal_premise() {
        let s = script("(start (forall (x Real) (atom lt-inv-dist x x 1)))\n(conclusion (forall (x Real) (atom lt-inv-dist x x 1)))");
        let r = run_script(&s).unwrap();
        assert!(r.witnesses.is_empty());
        assert_eq!(r.internal_sentence, s.start.unwrap());
    }

    #[test]
    fn continuity_through_idealisation_and_collapse() {
        let s = script(
            "(start (forall-st (x Real) (forall (y Real) (imp (approx x y) (approx (app f x) (app f y))))))\n\
             (rewrite unfold ())\n(rewrite prenex ())\n(rewrite idealize (0 0))\n\
             (supply ns (lam (x Real) (lam (n1 Nat) (cons n1 (nil Nat)))))\n\
             (rewrite max-collapse (0 0))\n\
             (conclusion (forall-st (x Real) (forall-st (k Nat) (exists-st (N Nat) (forall (y Real) (imp (atom lt-inv-dist x y N) (atom lt-inv-dist (app f x) (app f y) k)))))))",
        );
        let r = run_script(&s).unwrap();
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].binder, "n");
        assert!(r.witnesses[0].witness.single);
        assert_eq!(
            print_term(&r.witnesses[0].witness.term),
            "(lam (x Real) (lam (n1 Nat) (max (cons n1 (nil Nat)))))"
        );
        assert_eq!(
            print_formula(&r.internal_sentence),
            "(forall (x Real) (forall (n1 Nat) (forall (y Real) (imp (atom lt-inv-dist x y (max (cons n1 (nil Nat)))) (atom lt-inv-dist (app f x) (app f y) n1)))))"
        );
        assert_eq!(
            r.provenance.rules(),
            vec!["unfold", "prenex", "idealize", "max-collapse"]
        );
    }

    #[test]
    fn list_witness_and_term_level_max() {
        let s = script(
            "(start (forall-st (x Real) (forall-st (k Nat) (exists-st (N Nat) (forall (y Real) (imp (atom lt-inv-dist x y N) (atom lt-inv-dist (app f x) (app f y) k)))))))\n\
             (axiom st-closed dbl (lam (a Nat) (rec Nat 0 (lam (i Nat) (lam (r Nat) (succ (succ r)))) a)))\n\
             (axiom st-app c dbl k)\n(supply N c)\n(axiom max N)\n\
             (conclusion (forall-st (x Real) (forall-st (k Nat) (exists-st (N Nat) (forall (y Real) (imp (atom lt-inv-dist x y N) (atom lt-inv-dist (app f x) (app f y) k)))))))",
        );
        let r = run_script(&s).unwrap();
        let w = &r.witnesses[0].witness;
        assert!(w.single);
        // the Real argument is ignored, so a numeral stands in for it
        let mut ev = crate::eval::Evaluator::new(10_000);
        let f = ev.eval(&w.term, &crate::eval::Env::empty()).unwrap();
        let v = ev.apply_all(&f, &[Value::Num(0), Value::Num(3)]).unwrap();
        assert_eq!(v, Value::Num(6));
    }

    #[test]
    fn errors_are_reported() {
        let concl = "(conclusion (forall-st (x Real) (forall-st (k Nat) (exists-st (N Nat) (forall (y Real) (imp (atom lt-inv-dist x y N) (atom lt-inv-dist (app f x) (app f y) k)))))))";
        let start = "(start (forall-st (x Real) (forall-st (k Nat) (exists-st (N Nat) (forall (y Real) (imp (atom lt-inv-dist x y N) (atom lt-inv-dist (app f x) (app f y) k)))))))";
        let r = run_script(&script(&format!("{start}\n{concl}")));
        assert_eq!(r.unwrap_err(), ExtractError::MissingWitness("N".into()));
        let r = run_script(&script(&format!("{start}\n(oracle MU2)\n{concl}")));
        assert_eq!(
            r.unwrap_err(),
            ExtractError::OracleNotDeclared("MU2".into())
        );
        let r = run_script(&script(&format!("{start}\n(supply N y)\n{concl}")));
        assert!(matches!(r, Err(ExtractError::IllTypedInstantiation(_))));
        let r = run_script(&script(&format!("{start}\n(rewrite idealize ())\n{concl}")));
        assert!(matches!(
            r,
            Err(ExtractError::StepInapplicable { index: 1, .. })
        ));
        let r = run_script(&script(&format!(
            "{start}\n(supply N k)\n(conclusion (eq0 0 0))"
        )));
        assert!(matches!(r, Err(ExtractError::ConclusionMismatch { .. })));
    }

    #[test]
    fn h_mode_rejects_classical_prenex() {
        let s = script(
            "(mode H)\n(start (forall-st (x Real) (forall (y Real) (imp (approx x y) (approx (app f x) (app f y))))))\n(rewrite unfold ())\n(rewrite prenex ())\n(conclusion (eq0 0 0))",
        );
        assert_eq!(s.mode, Mode::H);
        assert!(matches!(
            run_script(&s),
            Err(ExtractError::Rewrite(RewriteError::WrongMode { .. }))
        ));
    }

    #[test]
    fn hac_curries_the_witness() {
        let s = parse_script(
            "(declare-atom phi (Nat Nat) :decidable)\n(start (forall-st (x Nat) (exists-st (y Nat) (atom phi x y))))\n(supply y (succ x))\n(rewrite hac ())\n(conclusion (eq0 0 0))",
            &Signature::default(),
        )
        .unwrap();
        let mut st = ExtractState::new(&s, s.start.clone().unwrap());
        for (k, step) in s.steps.iter().enumerate() {
            st.index = k + 1;
            st.step(step).unwrap();
            st.validate().unwrap();
        }
        assert_eq!(
            print_formula(&st.cur),
            "(exists-st (G (-> Nat (Seq Nat))) (forall-st (x Nat) (exists (i Nat) (and (le0 (succ i) (len (app G x))) (atom phi x (idx (app G x) i))))))"
        );
        assert_eq!(
            print_term(&st.wit["G"].term),
            "(lam (x Nat) (cons (succ x) (nil Nat)))"
        );
    }

    #[test]
    fn modus_ponens_feeds_zeta() {
        let s = parse_script(
            "(declare-atom phi (Nat Nat) :decidable)\n(declare-atom psi (Nat Nat) :decidable)\n\
             (premise L (imp (forall-st (x Nat) (exists-st (y Nat) (atom phi x y))) (forall-st (z Nat) (exists-st (w Nat) (atom psi z w)))) (witness w single (lam (zeta (-> Nat Nat)) (lam (z Nat) (app zeta z)))) (witness x single (lam (zeta (-> Nat Nat)) (lam (z Nat) z))))\n\
             (start (forall-st (a Nat) (exists-st (b Nat) (atom phi a b))))\n(supply b (succ (succ a)))\n(mp L)\n\
             (conclusion (forall-st (z Nat) (exists-st (w Nat) (atom psi z w))))",
            &Signature::default(),
        )
        .unwrap();
        let r = run_script(&s).unwrap();
        let t = Term::app(r.witnesses[0].witness.term.clone(), Term::numeral(4));
        assert_eq!(normalize(&t).unwrap(), Value::Num(6));
    }
}
