//! Free variables, capture-avoiding substitution, renaming and alpha-equivalence.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::ast::*;

pub fn free_vars_term(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fv_term(t, &mut Vec::new(), &mut out);
    out
}

pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fv_formula(f, &mut Vec::new(), &mut out);
    out
}

fn fv_term(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Lam(x, _, b) => {
            bound.push(x.clone());
            fv_term(b, bound, out);
            bound.pop();
        }
        _ => {
            for c in term_children(t) {
                fv_term(c, bound, out);
            }
        }
    }
}

fn fv_formula(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match f {
        Formula::Eq0(a, b) | Formula::Le0(a, b) | Formula::Approx(a, b) => {
            fv_term(a, bound, out);
            fv_term(b, bound, out);
        }
        Formula::Atom(_, args) => {
            for a in args {
                fv_term(a, bound, out);
            }
        }
        Formula::St(t) => fv_term(t, bound, out),
        Formula::Forall(x, _, b)
        | Formula::Exists(x, _, b)
        | Formula::ForallSt(x, _, b)
        | Formula::ExistsSt(x, _, b)
        | Formula::ForallOmega(x, b)
        | Formula::ForallInf(x, b) => {
            bound.push(x.clone());
            fv_formula(b, bound, out);
            bound.pop();
        }
        _ => {
            for c in f.children() {
                fv_formula(c, bound, out);
            }
        }
    }
}

/// Immediate subterms.
pub fn term_children(t: &Term) -> Vec<&Term> {
    match t {
        Term::Var(_) | Term::Zero | Term::Nil(_) => vec![],
        Term::Lam(_, _, b) | Term::Succ(b) | Term::Len(b) | Term::MaxNat(b) => vec![b],
        Term::App(a, b)
        | Term::Cons(a, b)
        | Term::Append(a, b)
        | Term::Idx(a, b)
        | Term::Prefix(a, b) => vec![a, b],
        Term::Rec(_, a, b, c) => vec![a, b, c],
    }
}

/// Every identifier occurring in the formula (bound, free or as binder).
pub fn all_names(f: &Formula) -> HashSet<String> {
    let mut out = HashSet::new();
    fn term(t: &Term, out: &mut HashSet<String>) {
        match t {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Lam(x, _, b) => {
                out.insert(x.clone());
                term(b, out);
            }
            _ => {
                for c in term_children(t) {
                    term(c, out);
                }
            }
        }
    }
    fn go(f: &Formula, out: &mut HashSet<String>) {
        match f {
            Formula::Eq0(a, b) | Formula::Le0(a, b) | Formula::Approx(a, b) => {
                term(a, out);
                term(b, out);
            }
            Formula::Atom(_, args) => args.iter().for_each(|a| term(a, out)),
            Formula::St(t) => term(t, out),
            _ => {
                if let Some((_, x, _, _)) = f.as_quant() {
                    out.insert(x.to_string());
                }
                if let Formula::ForallOmega(x, _) | Formula::ForallInf(x, _) = f {
                    out.insert(x.clone());
                }
                for c in f.children() {
                    go(c, out);
                }
            }
        }
    }
    go(f, &mut out);
    out
}

pub fn all_names_term(t: &Term) -> HashSet<String> {
    all_names(&Formula::St(t.clone()))
}

/// A name based on `base` that is not in `avoid`.
pub fn fresh(base: &str, avoid: &HashSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}

/// Supplies fresh names relative to a growing avoid-set.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: HashSet<String>,
}

impl NameSupply {
    pub fn new(used: HashSet<String>) -> NameSupply {
        NameSupply { used }
    }

    pub fn for_formula(f: &Formula) -> NameSupply {
        NameSupply::new(all_names(f))
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let n = fresh(base, &self.used);
        self.used.insert(n.clone());
        n
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn reserve_all(&mut self, f: &Formula) {
        self.used.extend(all_names(f));
    }
}

/// Capture-avoiding substitution `t[x := s]`.
pub fn subst_term(t: &Term, x: &str, s: &Term) -> Term {
    let fv = free_vars_term(s);
    subst_term_fv(t, x, s, &fv)
}

fn subst_term_fv(t: &Term, x: &str, s: &Term, fv: &BTreeSet<String>) -> Term {
    let go = |u: &Term| Box::new(subst_term_fv(u, x, s, fv));
    match t {
        Term::Var(y) => {
            if y == x {
                s.clone()
            } else {
                t.clone()
            }
        }
        Term::Lam(y, ty, b) => {
            if y == x {
                t.clone()
            } else if fv.contains(y) {
                let mut avoid: HashSet<String> = fv.iter().cloned().collect();
                avoid.extend(all_names_term(b));
                avoid.insert(x.to_string());
                let y2 = fresh(y, &avoid);
                let b2 = subst_term(b, y, &Term::Var(y2.clone()));
                Term::Lam(y2, ty.clone(), go(&b2))
            } else {
                Term::Lam(y.clone(), ty.clone(), go(b))
            }
        }
        Term::Zero => Term::Zero,
        Term::Nil(ty) => Term::Nil(ty.clone()),
        Term::Succ(a) => Term::Succ(go(a)),
        Term::Len(a) => Term::Len(go(a)),
        Term::MaxNat(a) => Term::MaxNat(go(a)),
        Term::App(a, b) => Term::App(go(a), go(b)),
        Term::Cons(a, b) => Term::Cons(go(a), go(b)),
        Term::Append(a, b) => Term::Append(go(a), go(b)),
        Term::Idx(a, b) => Term::Idx(go(a), go(b)),
        Term::Prefix(a, b) => Term::Prefix(go(a), go(b)),
        Term::Rec(ty, a, b, c) => Term::Rec(ty.clone(), go(a), go(b), go(c)),
    }
}

/// Capture-avoiding substitution `f[x := s]`.
pub fn substitute(f: &Formula, x: &str, s: &Term) -> Formula {
    let fv = free_vars_term(s);
    subst_formula_fv(f, x, s, &fv)
}

fn subst_formula_fv(f: &Formula, x: &str, s: &Term, fv: &BTreeSet<String>) -> Formula {
    let st = |u: &Term| subst_term_fv(u, x, s, fv);
    let go = |g: &Formula| Box::new(subst_formula_fv(g, x, s, fv));
    match f {
        Formula::Eq0(a, b) => Formula::Eq0(st(a), st(b)),
        Formula::Le0(a, b) => Formula::Le0(st(a), st(b)),
        Formula::Approx(a, b) => Formula::Approx(st(a), st(b)),
        Formula::Atom(n, args) => Formula::Atom(n.clone(), args.iter().map(st).collect()),
        Formula::St(t) => Formula::St(st(t)),
        Formula::And(a, b) => Formula::And(go(a), go(b)),
        Formula::Or(a, b) => Formula::Or(go(a), go(b)),
        Formula::Imp(a, b) => Formula::Imp(go(a), go(b)),
        Formula::Not(a) => Formula::Not(go(a)),
        Formula::ForallOmega(y, b) | Formula::ForallInf(y, b) => {
            let (y2, b2) = avoid_capture(y, b, x, fv);
            let body = if y2 == x {
                b2
            } else {
                subst_formula_fv(&b2, x, s, fv)
            };
            if matches!(f, Formula::ForallOmega(..)) {
                Formula::ForallOmega(y2, Box::new(body))
            } else {
                Formula::ForallInf(y2, Box::new(body))
            }
        }
        _ => {
            let (q, y, ty, b) = f.as_quant().unwrap();
            if y == x {
                return f.clone();
            }
            let (y2, b2) = avoid_capture(y, b, x, fv);
            q.build(y2, ty.clone(), subst_formula_fv(&b2, x, s, fv))
        }
    }
}

fn avoid_capture(y: &str, body: &Formula, x: &str, fv: &BTreeSet<String>) -> (String, Formula) {
    if y != x && fv.contains(y) {
        let mut avoid: HashSet<String> = fv.iter().cloned().collect();
        avoid.extend(all_names(body));
        avoid.insert(x.to_string());
        let y2 = fresh(y, &avoid);
        let b2 = substitute(body, y, &Term::Var(y2.clone()));
        (y2, b2)
    } else {
        (y.to_string(), body.clone())
    }
}

/// Simultaneous replacement of a subterm by another (syntactic, no binders crossed).
pub fn replace_subterm(f: &Formula, from: &Term, to: &Term) -> Formula {
    fn rt(t: &Term, from: &Term, to: &Term) -> Term {
        if t == from {
            return to.clone();
        }
        let go = |u: &Term| Box::new(rt(u, from, to));
        match t {
            Term::Var(_) | Term::Zero | Term::Nil(_) => t.clone(),
            Term::Lam(x, ty, b) => Term::Lam(x.clone(), ty.clone(), go(b)),
            Term::Succ(a) => Term::Succ(go(a)),
            Term::Len(a) => Term::Len(go(a)),
            Term::MaxNat(a) => Term::MaxNat(go(a)),
            Term::App(a, b) => Term::App(go(a), go(b)),
            Term::Cons(a, b) => Term::Cons(go(a), go(b)),
            Term::Append(a, b) => Term::Append(go(a), go(b)),
            Term::Idx(a, b) => Term::Idx(go(a), go(b)),
            Term::Prefix(a, b) => Term::Prefix(go(a), go(b)),
            Term::Rec(ty, a, b, c) => Term::Rec(ty.clone(), go(a), go(b), go(c)),
        }
    }
    map_terms(f, &|t| rt(t, from, to))
}

/// Applies `g` to every top-level term of every atomic subformula.
pub fn map_terms(f: &Formula, g: &dyn Fn(&Term) -> Term) -> Formula {
    let go = |h: &Formula| Box::new(map_terms(h, g));
    match f {
        Formula::Eq0(a, b) => Formula::Eq0(g(a), g(b)),
        Formula::Le0(a, b) => Formula::Le0(g(a), g(b)),
        Formula::Approx(a, b) => Formula::Approx(g(a), g(b)),
        Formula::Atom(n, args) => Formula::Atom(n.clone(), args.iter().map(g).collect()),
        Formula::St(t) => Formula::St(g(t)),
        Formula::And(a, b) => Formula::And(go(a), go(b)),
        Formula::Or(a, b) => Formula::Or(go(a), go(b)),
        Formula::Imp(a, b) => Formula::Imp(go(a), go(b)),
        Formula::Not(a) => Formula::Not(go(a)),
        Formula::ForallOmega(y, b) => Formula::ForallOmega(y.clone(), go(b)),
        Formula::ForallInf(y, b) => Formula::ForallInf(y.clone(), go(b)),
        _ => {
            let (q, y, ty, b) = f.as_quant().unwrap();
            q.build(y.to_string(), ty.clone(), map_terms(b, g))
        }
    }
}

/// Renames every binder so that binders are pairwise distinct and distinct
/// from free variables and from `reserved`.
pub fn rename_apart(f: &Formula, reserved: HashSet<String>) -> Formula {
    let mut used = reserved;
    used.extend(free_vars(f));
    let mut r = Renamer {
        used,
        scope: HashMap::new(),
    };
    r.formula(f)
}

pub fn rename_term_apart(t: &Term, reserved: HashSet<String>) -> Term {
    let mut used = reserved;
    used.extend(free_vars_term(t));
    let mut r = Renamer {
        used,
        scope: HashMap::new(),
    };
    r.term(t)
}

struct Renamer {
    used: HashSet<String>,
    scope: HashMap<String, Vec<String>>,
}

impl Renamer {
    fn bind(&mut self, x: &str) -> String {
        let n = fresh(x, &self.used);
        self.used.insert(n.clone());
        self.scope.entry(x.to_string()).or_default().push(n.clone());
        n
    }

    fn unbind(&mut self, x: &str) {
        self.scope.get_mut(x).unwrap().pop();
    }

    fn lookup(&self, x: &str) -> String {
        self.scope
            .get(x)
            .and_then(|v| v.last())
            .cloned()
            .unwrap_or_else(|| x.to_string())
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(x) => Term::Var(self.lookup(x)),
            Term::Lam(x, ty, b) => {
                let n = self.bind(x);
                let b2 = self.term(b);
                self.unbind(x);
                Term::Lam(n, ty.clone(), Box::new(b2))
            }
            Term::Zero => Term::Zero,
            Term::Nil(ty) => Term::Nil(ty.clone()),
            Term::Succ(a) => Term::Succ(Box::new(self.term(a))),
            Term::Len(a) => Term::Len(Box::new(self.term(a))),
            Term::MaxNat(a) => Term::MaxNat(Box::new(self.term(a))),
            Term::App(a, b) => Term::App(Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Cons(a, b) => Term::Cons(Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Append(a, b) => Term::Append(Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Idx(a, b) => Term::Idx(Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Prefix(a, b) => Term::Prefix(Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Rec(ty, a, b, c) => Term::Rec(
                ty.clone(),
                Box::new(self.term(a)),
                Box::new(self.term(b)),
                Box::new(self.term(c)),
            ),
        }
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Eq0(a, b) => Formula::Eq0(self.term(a), self.term(b)),
            Formula::Le0(a, b) => Formula::Le0(self.term(a), self.term(b)),
            Formula::Approx(a, b) => Formula::Approx(self.term(a), self.term(b)),
            Formula::Atom(n, args) => {
                Formula::Atom(n.clone(), args.iter().map(|a| self.term(a)).collect())
            }
            Formula::St(t) => Formula::St(self.term(t)),
            Formula::And(a, b) => Formula::and(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => Formula::or(self.formula(a), self.formula(b)),
            Formula::Imp(a, b) => Formula::imp(self.formula(a), self.formula(b)),
            Formula::Not(a) => Formula::not(self.formula(a)),
            Formula::ForallOmega(x, b) | Formula::ForallInf(x, b) => {
                let n = self.bind(x);
                let b2 = Box::new(self.formula(b));
                self.unbind(x);
                if matches!(f, Formula::ForallOmega(..)) {
                    Formula::ForallOmega(n, b2)
                } else {
                    Formula::ForallInf(n, b2)
                }
            }
            _ => {
                let (q, x, ty, b) = f.as_quant().unwrap();
                let n = self.bind(x);
                let b2 = self.formula(b);
                self.unbind(x);
                q.build(n, ty.clone(), b2)
            }
        }
    }
}

/// True when every binder in `f` is distinct and no binder name is free.
pub fn binders_unique(f: &Formula) -> bool {
    let mut seen = HashSet::new();
    let fv = free_vars(f);
    fn term(t: &Term, seen: &mut HashSet<String>, fv: &BTreeSet<String>) -> bool {
        match t {
            Term::Lam(x, _, b) => seen.insert(x.clone()) && !fv.contains(x) && term(b, seen, fv),
            _ => term_children(t).into_iter().all(|c| term(c, seen, fv)),
        }
    }
    fn go(f: &Formula, seen: &mut HashSet<String>, fv: &BTreeSet<String>) -> bool {
        let here = match f {
            Formula::Eq0(a, b) | Formula::Le0(a, b) | Formula::Approx(a, b) => {
                return term(a, seen, fv) && term(b, seen, fv)
            }
            Formula::Atom(_, args) => return args.iter().all(|a| term(a, seen, fv)),
            Formula::St(t) => return term(t, seen, fv),
            Formula::ForallOmega(x, _) | Formula::ForallInf(x, _) => Some(x.as_str()),
            _ => f.as_quant().map(|q| q.1),
        };
        if let Some(x) = here {
            if !seen.insert(x.to_string()) || fv.contains(x) {
                return false;
            }
        }
        f.children().into_iter().all(|c| go(c, seen, fv))
    }
    go(f, &mut seen, &fv)
}

// ---------------------------------------------------------------------------
// alpha-equivalence

struct Env<'a> {
    a: Vec<&'a str>,
    b: Vec<&'a str>,
}

impl<'a> Env<'a> {
    fn var_eq(&self, x: &str, y: &str) -> bool {
        let i = self.a.iter().rposition(|n| *n == x);
        let j = self.b.iter().rposition(|n| *n == y);
        match (i, j) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        }
    }
}

fn term_eq<'a>(s: &'a Term, t: &'a Term, env: &mut Env<'a>) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => env.var_eq(x, y),
        (Term::Lam(x, tx, bx), Term::Lam(y, ty, by)) => {
            if tx != ty {
                return false;
            }
            env.a.push(x);
            env.b.push(y);
            let r = term_eq(bx, by, env);
            env.a.pop();
            env.b.pop();
            r
        }
        (Term::Zero, Term::Zero) => true,
        (Term::Nil(a), Term::Nil(b)) => a == b,
        (Term::Rec(ta, a1, a2, a3), Term::Rec(tb, b1, b2, b3)) => {
            ta == tb && term_eq(a1, b1, env) && term_eq(a2, b2, env) && term_eq(a3, b3, env)
        }
        _ => {
            std::mem::discriminant(s) == std::mem::discriminant(t) && {
                let (cs, ct) = (term_children(s), term_children(t));
                cs.len() == ct.len() && cs.into_iter().zip(ct).all(|(a, b)| term_eq(a, b, env))
            }
        }
    }
}

pub fn alpha_eq_term(s: &Term, t: &Term) -> bool {
    term_eq(
        s,
        t,
        &mut Env {
            a: vec![],
            b: vec![],
        },
    )
}

fn formula_eq<'a>(f: &'a Formula, g: &'a Formula, env: &mut Env<'a>, blocks: bool) -> bool {
    match (f, g) {
        (Formula::Eq0(a1, a2), Formula::Eq0(b1, b2))
        | (Formula::Le0(a1, a2), Formula::Le0(b1, b2))
        | (Formula::Approx(a1, a2), Formula::Approx(b1, b2)) => {
            term_eq(a1, b1, env) && term_eq(a2, b2, env)
        }
        (Formula::Atom(n, xs), Formula::Atom(m, ys)) => {
            n == m && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| term_eq(a, b, env))
        }
        (Formula::St(a), Formula::St(b)) => term_eq(a, b, env),
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Imp(a1, a2), Formula::Imp(b1, b2)) => {
            formula_eq(a1, b1, env, blocks) && formula_eq(a2, b2, env, blocks)
        }
        (Formula::Not(a), Formula::Not(b)) => formula_eq(a, b, env, blocks),
        (Formula::ForallOmega(x, a), Formula::ForallOmega(y, b))
        | (Formula::ForallInf(x, a), Formula::ForallInf(y, b)) => {
            env.a.push(x);
            env.b.push(y);
            let r = formula_eq(a, b, env, blocks);
            env.a.pop();
            env.b.pop();
            r
        }
        _ => match (f.as_quant(), g.as_quant()) {
            (Some((qa, ..)), Some((qb, ..))) if qa == qb => {
                if blocks {
                    block_eq(f, g, env)
                } else {
                    let (_, x, tx, a) = f.as_quant().unwrap();
                    let (_, y, ty, b) = g.as_quant().unwrap();
                    if tx != ty {
                        return false;
                    }
                    env.a.push(x);
                    env.b.push(y);
                    let r = formula_eq(a, b, env, blocks);
                    env.a.pop();
                    env.b.pop();
                    r
                }
            }
            _ => false,
        },
    }
}

fn run(f: &Formula) -> (Vec<(&str, &Type)>, &Formula) {
    let (q0, ..) = f.as_quant().unwrap();
    let mut out = Vec::new();
    let mut cur = f;
    while let Some((q, x, t, b)) = cur.as_quant() {
        if q != q0 {
            break;
        }
        out.push((x, t));
        cur = b;
    }
    (out, cur)
}

fn block_eq<'a>(f: &'a Formula, g: &'a Formula, env: &mut Env<'a>) -> bool {
    let (ra, ba) = run(f);
    let (rb, bb) = run(g);
    if ra.len() != rb.len() {
        return false;
    }
    let n = ra.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    fn search<'a>(
        k: usize,
        ra: &[(&'a str, &'a Type)],
        rb: &[(&'a str, &'a Type)],
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ba: &'a Formula,
        bb: &'a Formula,
        env: &mut Env<'a>,
    ) -> bool {
        if k == ra.len() {
            let base_a = env.a.len();
            let base_b = env.b.len();
            for (i, (x, _)) in ra.iter().enumerate() {
                env.a.push(x);
                env.b.push(rb[perm[i]].0);
            }
            let r = formula_eq(ba, bb, env, true);
            env.a.truncate(base_a);
            env.b.truncate(base_b);
            return r;
        }
        for j in 0..ra.len() {
            if !used[j] && ra[k].1 == rb[j].1 {
                used[j] = true;
                perm[k] = j;
                if search(k + 1, ra, rb, perm, used, ba, bb, env) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    search(0, &ra, &rb, &mut perm, &mut used, ba, bb, env)
}

/// Alpha-equivalence of formulas.
pub fn alpha_eq(f: &Formula, g: &Formula) -> bool {
    formula_eq(
        f,
        g,
        &mut Env {
            a: vec![],
            b: vec![],
        },
        false,
    )
}

/// Alpha-equivalence that also permits permutation of binders inside a run
/// of same-kind quantifiers.
pub fn alpha_eq_blocks(f: &Formula, g: &Formula) -> bool {
    formula_eq(
        f,
        g,
        &mut Env {
            a: vec![],
            b: vec![],
        },
        true,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(x: &str) -> Formula {
        Formula::atom("p", vec![Term::var(x)])
    }

    #[test]
    fn renaming_is_alpha_equal() {
        let a = Formula::quant(Quant::Forall, "x", Type::Nat, phi("x"));
        let b = Formula::quant(Quant::Forall, "y", Type::Nat, phi("y"));
        assert!(alpha_eq(&a, &b));
        let c = Formula::quant(Quant::Exists, "y", Type::Nat, phi("y"));
        assert!(!alpha_eq(&a, &c));
    }

    #[test]
    fn free_vars_of_implication() {
        let f = Formula::imp(
            phi("x"),
            Formula::quant(
                Quant::Forall,
                "x",
                Type::Nat,
                Formula::atom("q", vec![Term::var("x")]),
            ),
        );
        assert_eq!(
            free_vars(&f).into_iter().collect::<Vec<_>>(),
            vec!["x".to_string()]
        );
    }

    #[test]
    fn substitute_under_binder() {
        let f = Formula::quant(
            Quant::Exists,
            "y",
            Type::Nat,
            Formula::atom("r", vec![Term::var("x"), Term::var("y")]),
        );
        let g = substitute(&f, "x", &Term::Zero);
        let expect = Formula::quant(
            Quant::Exists,
            "y",
            Type::Nat,
            Formula::atom("r", vec![Term::Zero, Term::var("y")]),
        );
        assert_eq!(g, expect);
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = Formula::quant(
            Quant::Exists,
            "y",
            Type::Nat,
            Formula::atom("r", vec![Term::var("x"), Term::var("y")]),
        );
        let g = substitute(&f, "x", &Term::var("y"));
        let Formula::Exists(y2, _, body) = &g else {
            panic!()
        };
        assert_ne!(y2, "y");
        assert_eq!(
            **body,
            Formula::atom("r", vec![Term::var("y"), Term::var(y2)])
        );
        assert_eq!(g.atom_names(), f.atom_names());
    }

    #[test]
    fn block_permutation() {
        let m = Formula::atom("r", vec![Term::var("a"), Term::var("b")]);
        let f = Formula::quant(
            Quant::ForallSt,
            "a",
            Type::Nat,
            Formula::quant(Quant::ForallSt, "b", Type::Nat, m.clone()),
        );
        let g = Formula::quant(
            Quant::ForallSt,
            "b",
            Type::Nat,
            Formula::quant(Quant::ForallSt, "a", Type::Nat, m),
        );
        assert!(!alpha_eq(&f, &g));
        assert!(alpha_eq_blocks(&f, &g));
    }

    #[test]
    fn rename_apart_makes_unique() {
        let f = Formula::and(
            Formula::quant(Quant::Forall, "x", Type::Nat, phi("x")),
            Formula::and(
                Formula::quant(Quant::Forall, "x", Type::Nat, phi("x")),
                phi("x"),
            ),
        );
        let g = rename_apart(&f, HashSet::new());
        assert!(binders_unique(&g));
        assert!(alpha_eq(&f, &g));
        assert!(!binders_unique(&f));
    }
}
