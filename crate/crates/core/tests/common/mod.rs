#![allow(dead_code)]

use nsa::corpus;
use nsa::eval::{normalize_with_budget, EvalError, Value};
use nsa::extract::{parse_script, print_script};
use nsa::rewrite::{exists_in, forall_in};
use nsa::syntax::alpha_eq;
use nsa::syntax::ast::{Formula, Term, Type};
use nsa::syntax::gen::{formula_depth, Gen};
use nsa::syntax::parse::{parse_document, parse_formula};
use nsa::syntax::print::{print_document, print_formula};
use nsa::verify::{check_witness, Interpretation};

pub const BUDGET: u64 = 2_000_000;

fn eval(t: &Term) -> Result<Value, EvalError> {
    normalize_with_budget(t, BUDGET)
}

/// Result types whose values compare structurally.
fn pr_type(g: &mut Gen) -> Type {
    use rand::Rng;
    if g.rng().gen_bool(0.5) {
        Type::Nat
    } else {
        Type::seq(Type::Nat)
    }
}

/// Both recursor equations on `count` seeded instances with `n <= 8`:
/// `R b s 0 = b` and `R b s (n+1) = s n (R b s n)`. A side that fails (an
/// index out of range in a random term) must fail the same way on the
/// other. Returns how many instances were defined on both sides.
pub fn recursor_equations(seed: u64, count: usize) -> Result<usize, String> {
    use rand::Rng;
    let mut g = Gen::new(seed);
    let mut defined = 0;
    for k in 0..count {
        let ty = pr_type(&mut g);
        let base = g.gen_term(&ty, &mut vec![], 2);
        let step_ty = Type::arrow(Type::Nat, Type::arrow(ty.clone(), ty.clone()));
        let step = g.gen_term(&step_ty, &mut vec![], 2);
        let n = g.rng().gen_range(0..=8u64);
        let rec = |i: Term| {
            Term::Rec(
                ty.clone(),
                Box::new(base.clone()),
                Box::new(step.clone()),
                Box::new(i),
            )
        };
        let zero_l = eval(&rec(Term::Zero));
        let zero_r = eval(&base);
        if zero_l != zero_r {
            return Err(format!(
                "instance {k}: R b s 0 = {zero_l:?}, b = {zero_r:?}"
            ));
        }
        let succ_l = eval(&rec(Term::succ(Term::numeral(n))));
        let succ_r = eval(&Term::apps(
            step.clone(),
            [Term::numeral(n), rec(Term::numeral(n))],
        ));
        if succ_l != succ_r {
            return Err(format!(
                "instance {k} (n={n}): R b s (n+1) = {succ_l:?}, s n (R b s n) = {succ_r:?}"
            ));
        }
        if zero_l.is_ok() && succ_l.is_ok() {
            defined += 1;
        }
    }
    Ok(defined)
}

/// Every list of length at most `max_len` over `0..=max_val`.
pub fn all_lists(max_len: usize, max_val: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in &layer {
            for v in 0..=max_val {
                let mut x: Vec<u64> = l.clone();
                x.push(v);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn list_term(xs: &[u64]) -> Term {
    Term::list(xs.iter().map(|&v| Term::numeral(v)).collect(), Type::Nat)
}

fn holds(f: &Formula, interp: &Interpretation) -> Result<bool, String> {
    let sig = Default::default();
    check_witness(f, &sig, interp)
        .map(|r| r.pass())
        .map_err(|e| e.to_string())
}

/// `len (a ++ b) = len a + len b`, the bounded membership notation against
/// list membership, and indexing against the list, exhaustively. Returns
/// the number of checked cases.
pub fn list_laws(max_len: usize, max_val: u64) -> Result<usize, String> {
    let lists = all_lists(max_len, max_val);
    let interp = Interpretation::parse("", &Default::default()).map_err(|e| e.to_string())?;
    let mut cases = 0;
    for a in &lists {
        for b in &lists {
            let t = Term::len(Term::Append(Box::new(list_term(a)), Box::new(list_term(b))));
            let v = eval(&t).map_err(|e| e.to_string())?;
            cases += 1;
            if v != Value::Num((a.len() + b.len()) as u64) {
                return Err(format!("len({a:?} ++ {b:?}) = {v}"));
            }
        }
        let l = list_term(a);
        for (i, &x) in a.iter().enumerate() {
            let v =
                eval(&Term::idx(l.clone(), Term::numeral(i as u64))).map_err(|e| e.to_string())?;
            cases += 1;
            if v != Value::Num(x) {
                return Err(format!("{a:?}[{i}] = {v}"));
            }
        }
        for x in 0..=max_val {
            let member = exists_in(
                "i",
                l.clone(),
                Formula::Eq0(Term::idx(l.clone(), Term::var("i")), Term::numeral(x)),
            );
            cases += 1;
            if holds(&member, &interp)? != a.contains(&x) {
                return Err(format!("{x} in {a:?} read as {}", print_formula(&member)));
            }
            let below = forall_in(
                "i",
                l.clone(),
                Formula::Le0(Term::idx(l.clone(), Term::var("i")), Term::numeral(x)),
            );
            cases += 1;
            if holds(&below, &interp)? != a.iter().all(|&y| y <= x) {
                return Err(format!(
                    "all of {a:?} <= {x} read as {}",
                    print_formula(&below)
                ));
            }
        }
    }
    Ok(cases)
}

/// Print/parse round trip, up to alpha-equivalence, on `count` seeded
/// random formulas of depth <= 7.
pub fn random_roundtrip(seed: u64, count: usize) -> Result<usize, String> {
    let mut g = Gen::new(seed);
    let sig = g.signature().clone();
    for k in 0..count {
        let f = g.gen_closed_formula(6);
        if formula_depth(&f) > 7 {
            return Err(format!("generator exceeded depth 7 at {k}"));
        }
        let text = print_formula(&f);
        match parse_formula(&text, &sig) {
            Ok(back) if alpha_eq(&back, &f) => {
                // binders are apart after one pass, so the second is exact
                let again =
                    parse_formula(&print_formula(&back), &sig).map_err(|e| e.to_string())?;
                if again != back {
                    return Err(format!("{text}: second pass not stable"));
                }
            }
            Ok(back) => return Err(format!("{text}\nreads back as\n{}", print_formula(&back))),
            Err(e) => return Err(format!("{text}: {e}")),
        }
    }
    Ok(count)
}

/// Round trip of every corpus source, script and frozen normal form.
pub fn corpus_roundtrip() -> Result<usize, String> {
    let all = corpus::load(&corpus::default_root()).map_err(|e| e.to_string())?;
    let mut files = 0;
    for f in &all {
        let text = print_document(&f.source);
        let back = parse_document(&text).map_err(|e| format!("{}: {e}", f.name))?;
        if back.sig != f.source.sig || !alpha_eq(&back.formula, &f.source.formula) {
            return Err(format!("{}: source does not round trip", f.name));
        }
        files += 1;
        if let Some(s) = &f.script {
            let s1 = parse_script(s, &f.source.sig).map_err(|e| format!("{}: {e}", f.name))?;
            let s2 = parse_script(&print_script(&s1), &Default::default())
                .map_err(|e| format!("{}: {e}", f.name))?;
            if s1 != s2 {
                return Err(format!("{}: script does not round trip", f.name));
            }
            files += 1;
        }
        if let Some(nf) = f.expected("expected.nf") {
            let g = parse_formula(&nf, &f.source.sig).map_err(|e| format!("{}: {e}", f.name))?;
            if print_formula(&g) != nf.trim() {
                return Err(format!("{}: expected.nf is not in printed form", f.name));
            }
            files += 1;
        }
    }
    Ok(files)
}
