//! Brute-force witness checking over a finite interpretation.
//!
//! Sort elements are evaluator numerals (their index in the carrier);
//! declared parameters with a `fun` rule compute exact rationals, which only
//! flow into other parameters and atoms. Nothing here touches the rewrite
//! engine.

use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use crate::eval::{Closure, Env, Evaluator, Value};
use crate::rewrite::{match_exists_in, match_forall_in, NormalForm};
use crate::syntax::alpha::free_vars_term;
use crate::syntax::ast::*;
use crate::syntax::print::{print_formula, print_term};

use super::interp::{AtomInterp, Interpretation};
use super::rational::RVal;
use super::{Failure, VerificationReport, VerifyError};

/// Per-term reduction budget.
const TERM_BUDGET: u64 = 2_000_000;
/// Failures kept in a report; the count is always exact.
const KEEP_FAILURES: usize = 16;

#[derive(Clone, Debug)]
pub enum SV {
    T(Value),
    Q(RVal),
}

type Scope = Vec<(String, Type, SV)>;

/// A value as a memo key; closures compare by identity. The key keeps the
/// closure alive, so its address cannot be reused while the entry exists.
#[derive(Clone)]
enum VKey {
    N(u64),
    S(Vec<VKey>),
    C(Rc<Closure>),
}

impl VKey {
    fn of(v: &Value) -> VKey {
        match v {
            Value::Num(n) => VKey::N(*n),
            Value::Seq(xs, _) => VKey::S(xs.iter().map(VKey::of).collect()),
            Value::Closure(c) => VKey::C(c.clone()),
        }
    }
}

impl PartialEq for VKey {
    fn eq(&self, o: &VKey) -> bool {
        match (self, o) {
            (VKey::N(a), VKey::N(b)) => a == b,
            (VKey::S(a), VKey::S(b)) => a == b,
            (VKey::C(a), VKey::C(b)) => Rc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl Eq for VKey {}

impl Hash for VKey {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            VKey::N(n) => (0u8, n).hash(h),
            VKey::S(xs) => {
                1u8.hash(h);
                xs.hash(h)
            }
            VKey::C(c) => (2u8, Rc::as_ptr(c) as usize).hash(h),
        }
    }
}

const MEMO_LIMIT: usize = 1 << 20;

pub struct Semantics<'a> {
    pub sig: &'a Signature,
    pub interp: &'a Interpretation,
    carriers: BTreeMap<Type, Vec<Value>>,
    pub steps: u64,
    /// Values of compound terms under the values of their free variables;
    /// witness terms recur under every inner quantifier instance.
    memo: HashMap<(Term, Vec<VKey>), Value>,
}

fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut cur = t;
    while let Term::App(f, a) = cur {
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    (cur, args)
}

fn arrow_parts(t: &Type) -> (Vec<Type>, Type) {
    let mut args = Vec::new();
    let mut cur = t;
    while let Type::Arrow(a, b) = cur {
        args.push((**a).clone());
        cur = b;
    }
    (args, cur.clone())
}

impl<'a> Semantics<'a> {
    pub fn new(
        sig: &'a Signature,
        interp: &'a Interpretation,
    ) -> Result<Semantics<'a>, VerifyError> {
        let mut carriers = BTreeMap::new();
        let mut ev = Evaluator::new(TERM_BUDGET);
        for (ty, terms) in &interp.carriers {
            let vals = terms
                .iter()
                .map(|t| ev.eval(t, &Env::empty()))
                .collect::<Result<Vec<_>, _>>()?;
            carriers.insert(ty.clone(), vals);
        }
        Ok(Semantics {
            sig,
            interp,
            carriers,
            steps: 0,
            memo: HashMap::new(),
        })
    }

    /// Every element of a type, in carrier order.
    pub fn domain(&self, t: &Type) -> Result<Vec<SV>, VerifyError> {
        match t {
            Type::Nat => Ok((0..=self.interp.m).map(|n| SV::T(Value::Num(n))).collect()),
            Type::Sort(_) => {
                let n = self.interp.carrier_size(t)? as u64;
                Ok((0..n).map(|i| SV::T(Value::Num(i))).collect())
            }
            _ => self
                .carriers
                .get(t)
                .map(|v| v.iter().cloned().map(SV::T).collect())
                .ok_or_else(|| VerifyError::NoCarrier(t.to_string())),
        }
    }

    pub fn show(&self, t: &Type, v: &SV) -> String {
        match (t, v) {
            (_, SV::Q(q)) => q.to_string(),
            (Type::Nat | Type::Sort(_), SV::T(Value::Num(i))) => self.interp.show_base(t, *i),
            (_, SV::T(val)) => {
                // carrier elements are shown by position
                let same = |a: &Value| match (a, val) {
                    (Value::Closure(x), Value::Closure(y)) => Rc::ptr_eq(x, y),
                    (a, b) => a == b,
                };
                if let Some(j) = self.carriers.get(t).and_then(|c| c.iter().position(same)) {
                    return format!("#{j}");
                }
                match val.to_term() {
                    Some(t) => print_term(&t),
                    None => "<function>".into(),
                }
            }
        }
    }

    fn to_rval(&self, t: &Type, v: &SV) -> Result<RVal, VerifyError> {
        match v {
            SV::Q(q) => Ok(q.clone()),
            SV::T(Value::Num(i)) => self.interp.base_value(t, *i),
            SV::T(_) => Err(VerifyError::Rule(format!(
                "a value of type {t} cannot be read as a number"
            ))),
        }
    }

    fn is_fun(&self, name: &str, scope: &Scope) -> bool {
        !scope.iter().any(|(x, _, _)| x == name) && self.interp.funs.contains_key(name)
    }

    fn call_fun(&mut self, name: &str, args: &[&Term], scope: &Scope) -> Result<SV, VerifyError> {
        let ty = self
            .sig
            .var(name)
            .ok_or_else(|| VerifyError::Unbound(name.into()))?;
        let (doms, cod) = arrow_parts(ty);
        if doms.len() != args.len() {
            return Err(VerifyError::Rule(format!(
                "parameter `{name}` expects {} arguments, got {}",
                doms.len(),
                args.len()
            )));
        }
        let mut vals = Vec::new();
        for (d, a) in doms.iter().zip(args) {
            let v = self.term(a, scope)?;
            vals.push(self.to_rval(d, &v)?);
        }
        let r = self.interp.funs[name]
            .eval(&vals)
            .map_err(|e| VerifyError::Rule(format!("{name}: {e}")))?;
        if cod == Type::Nat {
            let n = r.as_nat().ok_or_else(|| {
                VerifyError::Rule(format!("{name} must return a natural number, got {r}"))
            })?;
            return Ok(SV::T(Value::Num(n)));
        }
        Ok(SV::Q(r))
    }

    /// Replaces parameter applications inside a T term by their values.
    fn resolve_funs(&mut self, t: &Term, scope: &Scope) -> Result<Term, VerifyError> {
        let (h, args) = spine(t);
        if let Term::Var(n) = h {
            if self.is_fun(n, scope) {
                return match self.call_fun(n, &args, scope)? {
                    SV::T(v) => v
                        .to_term()
                        .ok_or_else(|| VerifyError::Rule(format!("{n} returned a function"))),
                    SV::Q(q) => Err(VerifyError::Rule(format!(
                        "non-natural value {q} of `{n}` used inside a term of T"
                    ))),
                };
            }
        }
        let mut go = |x: &Term| self.resolve_funs(x, scope).map(Box::new);
        Ok(match t {
            Term::Var(_) | Term::Zero | Term::Nil(_) => t.clone(),
            Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), go(b)?),
            Term::App(f, a) => Term::App(go(f)?, go(a)?),
            Term::Succ(a) => Term::Succ(go(a)?),
            Term::Rec(ty, a, b, c) => Term::Rec(ty.clone(), go(a)?, go(b)?, go(c)?),
            Term::Cons(a, b) => Term::Cons(go(a)?, go(b)?),
            Term::Append(a, b) => Term::Append(go(a)?, go(b)?),
            Term::Len(a) => Term::Len(go(a)?),
            Term::Idx(a, b) => Term::Idx(go(a)?, go(b)?),
            Term::Prefix(a, b) => Term::Prefix(go(a)?, go(b)?),
            Term::MaxNat(a) => Term::MaxNat(go(a)?),
        })
    }

    fn mentions_fun(&self, t: &Term, scope: &Scope) -> bool {
        free_vars_term(t).iter().any(|v| self.is_fun(v, scope))
    }

    pub fn term(&mut self, t: &Term, scope: &Scope) -> Result<SV, VerifyError> {
        let (h, args) = spine(t);
        if let Term::Var(n) = h {
            if self.is_fun(n, scope) {
                return self.call_fun(n, &args, scope);
            }
        }
        let owned;
        let t = if self.mentions_fun(t, scope) {
            owned = self.resolve_funs(t, scope)?;
            &owned
        } else {
            t
        };
        let mut env = Env::empty();
        let mut key = Vec::new();
        for v in free_vars_term(t) {
            match scope.iter().rev().find(|(x, _, _)| *x == v) {
                Some((_, _, SV::T(val))) => {
                    key.push(VKey::of(val));
                    env = env.bind(&v, val.clone())
                }
                Some((_, _, SV::Q(q))) => {
                    return Err(VerifyError::Rule(format!(
                        "value {q} of `{v}` used inside a term of T"
                    )))
                }
                None => return Err(VerifyError::Unbound(v)),
            }
        }
        let compound = !matches!(t, Term::Var(_) | Term::Zero) && t.as_numeral().is_none();
        let key = (t.clone(), key);
        if compound {
            if let Some(v) = self.memo.get(&key) {
                return Ok(SV::T(v.clone()));
            }
        }
        let mut ev = Evaluator::new(TERM_BUDGET);
        let r = ev.eval(t, &env);
        self.steps += ev.steps();
        let r = r?;
        if compound {
            if self.memo.len() >= MEMO_LIMIT {
                self.memo.clear();
            }
            self.memo.insert(key, r.clone());
        }
        Ok(SV::T(r))
    }

    fn nat(&mut self, t: &Term, scope: &Scope) -> Result<u64, VerifyError> {
        match self.term(t, scope)? {
            SV::T(Value::Num(n)) => Ok(n),
            _ => Err(VerifyError::Rule(format!(
                "{} is not a natural number",
                print_term(t)
            ))),
        }
    }

    fn list_len(&mut self, t: &Term, scope: &Scope) -> Result<u64, VerifyError> {
        match self.term(t, scope)? {
            SV::T(Value::Seq(v, _)) => Ok(v.len() as u64),
            _ => Err(VerifyError::Rule(format!(
                "{} is not a list",
                print_term(t)
            ))),
        }
    }

    fn atom(&mut self, name: &str, args: &[Term], scope: &Scope) -> Result<bool, VerifyError> {
        let decl = self
            .sig
            .atom(name)
            .ok_or_else(|| VerifyError::UndecidableAtom(name.into()))?;
        if !decl.decidable {
            return Err(VerifyError::UndecidableAtom(name.into()));
        }
        let sorts = decl.sorts.clone();
        let interp = self
            .interp
            .atoms
            .get(name)
            .ok_or_else(|| VerifyError::UndecidableAtom(name.into()))?;
        match interp {
            AtomInterp::Rule(r) => {
                let r = r.clone();
                let mut vals = Vec::new();
                for (s, a) in sorts.iter().zip(args) {
                    let v = self.term(a, scope)?;
                    vals.push(self.to_rval(s, &v)?);
                }
                r.eval(&vals)
                    .map_err(|e| VerifyError::Rule(format!("{name}: {e}")))?
                    .as_bool()
                    .ok_or_else(|| VerifyError::Rule(format!("rule for {name} is not a predicate")))
            }
            AtomInterp::Table(bits) => {
                let bits = bits.clone();
                let mut idx = 0usize;
                for (s, a) in sorts.iter().zip(args) {
                    let size = self.interp.carrier_size(s)?;
                    let v = self.term(a, scope)?;
                    let pos = match (&v, s) {
                        (SV::T(Value::Num(i)), Type::Nat | Type::Sort(_)) => *i as usize,
                        (SV::T(val), _) => self
                            .carriers
                            .get(s)
                            .and_then(|c| c.iter().position(|c| c == val))
                            .ok_or_else(|| {
                                VerifyError::Rule(format!("{name}: argument outside its carrier"))
                            })?,
                        (SV::Q(q), _) => {
                            return Err(VerifyError::Rule(format!(
                                "{name}: table atom applied to {q}"
                            )))
                        }
                    };
                    if pos >= size {
                        return Err(VerifyError::Rule(format!(
                            "{name}: argument {pos} outside a carrier of size {size}"
                        )));
                    }
                    idx = idx * size + pos;
                }
                Ok(bits[idx])
            }
        }
    }

    pub fn formula(&mut self, f: &Formula, scope: &mut Scope) -> Result<bool, VerifyError> {
        if let Some((i, list, body)) = match_exists_in(f) {
            let n = self.list_len(list, scope)?;
            for k in 0..n {
                scope.push((i.into(), Type::Nat, SV::T(Value::Num(k))));
                let r = self.formula(body, scope);
                scope.pop();
                if r? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        if let Some((i, list, body)) = match_forall_in(f) {
            let n = self.list_len(list, scope)?;
            for k in 0..n {
                scope.push((i.into(), Type::Nat, SV::T(Value::Num(k))));
                let r = self.formula(body, scope);
                scope.pop();
                if !r? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        match f {
            Formula::Eq0(a, b) => Ok(self.nat(a, scope)? == self.nat(b, scope)?),
            Formula::Le0(a, b) => Ok(self.nat(a, scope)? <= self.nat(b, scope)?),
            Formula::Atom(n, args) => self.atom(n, args, scope),
            Formula::And(a, b) => Ok(self.formula(a, scope)? && self.formula(b, scope)?),
            Formula::Or(a, b) => Ok(self.formula(a, scope)? || self.formula(b, scope)?),
            Formula::Imp(a, b) => Ok(!self.formula(a, scope)? || self.formula(b, scope)?),
            Formula::Not(a) => Ok(!self.formula(a, scope)?),
            Formula::Forall(x, t, b) | Formula::Exists(x, t, b) => {
                let universal = matches!(f, Formula::Forall(..));
                for v in self.domain(t)? {
                    scope.push((x.clone(), t.clone(), v));
                    let r = self.formula(b, scope);
                    scope.pop();
                    if r? != universal {
                        return Ok(!universal);
                    }
                }
                Ok(universal)
            }
            _ => Err(VerifyError::NotInternal(print_formula(f))),
        }
    }

    /// Why a false formula is false: the first falsifying inner choices.
    fn explain(&mut self, f: &Formula, scope: &mut Scope) -> Result<String, VerifyError> {
        if let Some((i, list, _)) = match_exists_in(f) {
            let l = self.term(list, scope)?;
            let shown = match &l {
                SV::T(v) => v.to_term().map(|t| print_term(&t)).unwrap_or_default(),
                SV::Q(q) => q.to_string(),
            };
            return Ok(format!("no candidate {i} in {shown} works"));
        }
        if let Some((i, list, body)) = match_forall_in(f) {
            let n = self.list_len(list, scope)?;
            for k in 0..n {
                scope.push((i.into(), Type::Nat, SV::T(Value::Num(k))));
                if !self.formula(body, scope)? {
                    let d = self.explain(body, scope);
                    scope.pop();
                    return Ok(format!("{i}={k}, {}", d?));
                }
                scope.pop();
            }
        }
        match f {
            Formula::Forall(x, t, b) => {
                for v in self.domain(t)? {
                    let shown = self.show(t, &v);
                    scope.push((x.clone(), t.clone(), v));
                    if !self.formula(b, scope)? {
                        let d = self.explain(b, scope);
                        scope.pop();
                        return Ok(format!("{x}={shown}, {}", d?));
                    }
                    scope.pop();
                }
                Ok("holds".into())
            }
            Formula::Imp(_, b) => Ok(format!("premise holds, {}", self.explain(b, scope)?)),
            Formula::And(a, b) => {
                if !self.formula(a, scope)? {
                    self.explain(a, scope)
                } else {
                    self.explain(b, scope)
                }
            }
            Formula::Exists(x, _, _) => Ok(format!("no {x} in the carrier works")),
            other => Ok(format!("{} is false", print_formula(other))),
        }
    }
}

/// Leading plain universals, stopping at bounded ones.
fn leading_universals(f: &Formula) -> (Vec<(String, Type)>, &Formula) {
    let mut out = Vec::new();
    let mut cur = f;
    while let Formula::Forall(x, t, b) = cur {
        if match_forall_in(cur).is_some() {
            break;
        }
        out.push((x.clone(), t.clone()));
        cur = b;
    }
    (out, cur)
}

/// Calls `visit` on every tuple of the product of `doms`, in lexicographic
/// order; stops early when it returns `false`.
fn for_each_tuple(
    doms: &[Vec<SV>],
    visit: &mut dyn FnMut(&[SV]) -> Result<bool, VerifyError>,
) -> Result<(), VerifyError> {
    if doms.iter().any(|d| d.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; doms.len()];
    loop {
        let tuple: Vec<SV> = idx.iter().zip(doms).map(|(&i, d)| d[i].clone()).collect();
        if !visit(&tuple)? {
            return Ok(());
        }
        let mut k = doms.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < doms[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Checks an internal sentence `(forall x..) phi` by enumerating `x` over
/// the carriers and deciding `phi` for each tuple.
pub fn check_witness(
    sentence: &Formula,
    sig: &Signature,
    interp: &Interpretation,
) -> Result<VerificationReport, VerifyError> {
    if !sentence.is_internal() {
        return Err(VerifyError::NotInternal(print_formula(sentence)));
    }
    let mut sem = Semantics::new(sig, interp)?;
    let (prefix, body) = leading_universals(sentence);
    let doms = prefix
        .iter()
        .map(|(_, t)| sem.domain(t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = VerificationReport::default();
    for_each_tuple(&doms, &mut |tuple| {
        report.instances += 1;
        let mut scope: Scope = prefix
            .iter()
            .zip(tuple)
            .map(|((x, t), v)| (x.clone(), t.clone(), v.clone()))
            .collect();
        if !sem.formula(body, &mut scope)? {
            report.failed += 1;
            if report.failures.len() < KEEP_FAILURES {
                let assignment = prefix
                    .iter()
                    .zip(tuple)
                    .map(|((x, t), v)| format!("{x}={}", sem.show(t, v)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let detail = sem.explain(body, &mut scope)?;
                report.failures.push(Failure { assignment, detail });
            }
        }
        Ok(true)
    })?;
    report.steps = sem.steps;
    Ok(report)
}

/// Least `N >= 1` (up to `max_n`) for which the matrix of a normal form with
/// a single `Nat` existential holds for every value of the universals not
/// fixed by `fixed`. Universals are read as plain ones.
pub fn brute_force_modulus(
    nf: &NormalForm,
    sig: &Signature,
    interp: &Interpretation,
    fixed: &[(&str, u64)],
    max_n: u64,
) -> Result<u64, VerifyError> {
    let [(n, Type::Nat)] = nf.exist.as_slice() else {
        return Err(VerifyError::Shape(
            "the modulus search needs exactly one Nat existential".into(),
        ));
    };
    let mut sem = Semantics::new(sig, interp)?;
    let mut scope: Scope = Vec::new();
    let mut open = Vec::new();
    for (x, t) in &nf.univ {
        match fixed.iter().find(|(y, _)| y == x) {
            Some((_, v)) => scope.push((x.clone(), t.clone(), SV::T(Value::Num(*v)))),
            None => open.push((x.clone(), t.clone())),
        }
    }
    for k in 1..=max_n {
        let body = crate::syntax::alpha::substitute(&nf.matrix, n, &Term::numeral(k));
        let f = open.iter().rev().fold(body, |acc, (x, t)| {
            Formula::Forall(x.clone(), t.clone(), Box::new(acc))
        });
        if sem.formula(&f, &mut scope)? {
            return Ok(k);
        }
    }
    Err(VerifyError::NoModulus(max_n))
}

/// Outcome of checking the mu specification on the grid functions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MuReport {
    pub checked: usize,
    /// `(function, explanation)` for each violation.
    pub violations: Vec<(String, String)>,
}

impl MuReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `(exists n) f n = 0 -> f (mu f) = 0` for every grid function `f`, with
/// the existential searched up to the interpretation's horizon.
pub fn mu_grid_check(mu: &Term, interp: &Interpretation) -> Result<MuReport, VerifyError> {
    let mut report = MuReport::default();
    let mut ev = Evaluator::new(u64::MAX);
    let muv = ev.eval(mu, &Env::empty())?;
    for f in &interp.mu_grid {
        report.checked += 1;
        let fv = ev.eval(f, &Env::empty())?;
        let mut zero = None;
        for n in 0..=interp.mu_horizon {
            if ev.apply(&fv, Value::Num(n))? == Value::Num(0) {
                zero = Some(n);
                break;
            }
        }
        let Some(z) = zero else { continue };
        let m = ev.apply(&muv, fv.clone())?;
        let Value::Num(m) = m else {
            return Err(VerifyError::Rule("mu returned a non-number".into()));
        };
        if ev.apply(&fv, Value::Num(m))? != Value::Num(0) {
            report.violations.push((
                print_term(f),
                format!("first zero at {z}, but f(mu f) = f({m}) is not 0"),
            ));
        }
    }
    Ok(report)
}

/// The mutation used by the soundness tests: `lam x.. pred(body)`. For a
/// list witness every candidate shrinks by one.
pub fn decrement_witness(t: &Term, single: bool) -> Term {
    match t {
        Term::Lam(x, ty, b) => Term::Lam(
            x.clone(),
            ty.clone(),
            Box::new(decrement_witness(b, single)),
        ),
        body if single => crate::extract::terms::pred(body.clone()),
        body => {
            let used = crate::syntax::alpha::all_names_term(body);
            let i = crate::syntax::alpha::fresh("i", &used);
            let acc = crate::syntax::alpha::fresh("acc", &used);
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
                                crate::extract::terms::pred(Term::idx(body.clone(), Term::var(&i))),
                                Type::Nat,
                            )),
                        ),
                    ),
                )),
                Box::new(Term::len(body.clone())),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::{parse_document, parse_formula};

    const PRE: &str = "(declare-sort Real)\n(declare-atom lt-inv-dist (Real Real Nat) :decidable :antitone 2)\n(declare-var f (-> Real Real))\n";
    const INTERP: &str =
        "sort Real 17 unit\ncutoff K=1 M=8\natom lt-inv-dist rule (< (abs (- x0 x1)) (/ 1 x2))\n";

    fn setup(fun: &str) -> (Signature, Interpretation) {
        let sig = parse_document(&format!("{PRE}(eq0 0 0)")).unwrap().sig;
        let i = Interpretation::parse(&format!("{INTERP}fun f rule {fun}\n"), &sig).unwrap();
        (sig, i)
    }

    fn sentence(sig: &Signature, witness: &str) -> Formula {
        parse_formula(
            &format!("(forall (x Real) (forall (k Nat) (forall (y Real) (imp (atom lt-inv-dist x y {witness}) (atom lt-inv-dist (app f x) (app f y) k)))))"),
            sig,
        )
        .unwrap()
    }

    #[test]
    fn identity_with_modulus_k() {
        let (sig, i) = setup("x0");
        let r = check_witness(&sentence(&sig, "k"), &sig, &i).unwrap();
        assert!(r.pass());
        // the whole leading prefix x, k, y is enumerated
        assert_eq!(r.instances, 17 * 9 * 17);
    }

    #[test]
    fn decremented_modulus_fails_with_assignment() {
        let (sig, i) = setup("x0");
        let s = sentence(&sig, "(rec Nat 0 (lam (a Nat) (lam (b Nat) a)) k)");
        let r = check_witness(&s, &sig, &i).unwrap();
        assert!(!r.pass());
        let first = &r.failures[0];
        // k = 1 with modulus 0: every pair is close, so x=0, y=1 fails
        assert_eq!(first.assignment, "x=0, k=1, y=1");
        assert!(
            first.detail.starts_with("premise holds"),
            "{}",
            first.detail
        );
    }

    #[test]
    fn constant_function_and_singleton_list() {
        let (sig, i) = setup("1/2");
        let s = parse_formula(
            "(forall (x Real) (forall (k Nat) (exists (i Nat) (and (le0 (succ i) (len (cons 1 (nil Nat)))) (forall (y Real) (imp (atom lt-inv-dist x y (idx (cons 1 (nil Nat)) i)) (atom lt-inv-dist (app f x) (app f y) k)))))))",
            &sig,
        )
        .unwrap();
        assert!(check_witness(&s, &sig, &i).unwrap().pass());
    }

    #[test]
    fn modulus_oracle() {
        let (sig, i) = setup("x0");
        let d = parse_document(&format!(
            "{PRE}(forall-st (k Nat) (exists-st (N Nat) (forall (x Real) (forall (y Real) (imp (atom lt-inv-dist x y N) (atom lt-inv-dist (app f x) (app f y) k))))))"
        ))
        .unwrap();
        let nf = NormalForm::from_formula(&d.formula).unwrap();
        assert_eq!(
            brute_force_modulus(&nf, &sig, &i, &[("k", 4)], 64).unwrap(),
            4
        );
        let (sig2, i2) = setup("1/3");
        assert_eq!(
            brute_force_modulus(&nf, &sig2, &i2, &[("k", 4)], 64).unwrap(),
            1
        );
        // precision 0 is 1/0 = inf, met by any N
        assert_eq!(
            brute_force_modulus(&nf, &sig, &i, &[("k", 0)], 3).unwrap(),
            1
        );
        assert_eq!(
            brute_force_modulus(&nf, &sig, &i, &[("k", 4)], 3),
            Err(VerifyError::NoModulus(3))
        );
    }

    #[test]
    fn undecidable_and_external_are_errors() {
        let (sig, i) = setup("x0");
        let ext = parse_formula("(forall-st (k Nat) (eq0 k k))", &sig).unwrap();
        assert!(matches!(
            check_witness(&ext, &sig, &i),
            Err(VerifyError::NotInternal(_))
        ));
        let mut bare = i.clone();
        bare.atoms.clear();
        assert!(matches!(
            check_witness(&sentence(&sig, "k"), &sig, &bare),
            Err(VerifyError::UndecidableAtom(_))
        ));
    }

    #[test]
    fn mu_grid() {
        let sig = Signature::default();
        let mut i =
            Interpretation::parse("mu-grid first-zero 0 32\nmu-grid never\n", &sig).unwrap();
        let r = mu_grid_check(&crate::extract::bounded_mu(32), &i).unwrap();
        assert_eq!(r.checked, 34);
        assert!(r.pass());
        i.mu_grid.push(super::super::interp::first_zero_at(33));
        let r = mu_grid_check(&crate::extract::bounded_mu(32), &i).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].1.starts_with("first zero at 33"));
    }
}
