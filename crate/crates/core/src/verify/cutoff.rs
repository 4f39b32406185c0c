//! Cutoff semantics: a world `{0..M}` in which `st(n)` means `n <= K`.
//!
//! Atom tables are enumerated lazily: a formula is evaluated against a
//! partial table and every cell it actually reads is branched on. Each
//! finished branch stands for all tables agreeing on the cells it read, so
//! the branches together cover every table exactly once.
//!
//! Only the types the schemas need have a domain here:
//! - `Nat` is `{0..M}` (standard: `{0..K}`);
//! - `Seq Nat` is the duplicate-free ascending lists, i.e. subsets (standard:
//!   subsets of `{0..K}`), enough for formulas that use lists only through
//!   bounded quantifiers;
//! - `Nat -> Nat` and `Nat -> Seq Nat` are standard-only: functions with
//!   standard values on standard arguments and the default (`0`, the empty
//!   list) elsewhere, since a standard functional is only ever applied to
//!   standard arguments in the schemas.
//!
//! This is a falsification harness, not a model of the nonstandard systems.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rewrite::{trace::apply_rule, Engine, Mode};
use crate::syntax::ast::*;
use crate::syntax::parse::{parse_document, parse_formula};
use crate::syntax::print::{print_formula, print_term};

use super::{Failure, VerificationReport, VerifyError};

#[derive(Clone, Debug, PartialEq, Eq)]
enum CV {
    N(u64),
    L(Rc<Vec<u64>>),
    F(Rc<Vec<CV>>),
}

enum Stop {
    Need(usize, usize),
    Fail(VerifyError),
}

impl From<VerifyError> for Stop {
    fn from(e: VerifyError) -> Self {
        Stop::Fail(e)
    }
}

type R<T> = Result<T, Stop>;

struct Table {
    name: String,
    arity: usize,
    cells: Vec<Option<bool>>,
}

struct World {
    k: u64,
    m: u64,
    tables: Vec<Table>,
    domains: RefCell<HashMap<(Type, bool), Rc<Vec<CV>>>>,
}

fn unsupported<T>(what: String) -> R<T> {
    Err(Stop::Fail(VerifyError::Shape(format!(
        "cutoff semantics does not cover {what}"
    ))))
}

fn subsets(n: u64) -> Vec<CV> {
    (0u64..(1 << (n + 1)))
        .map(|mask| CV::L(Rc::new((0..=n).filter(|i| mask >> i & 1 == 1).collect())))
        .collect()
}

impl World {
    fn domain(&self, t: &Type, st: bool) -> R<Rc<Vec<CV>>> {
        if let Some(d) = self.domains.borrow().get(&(t.clone(), st)) {
            return Ok(d.clone());
        }
        let top = if st { self.k } else { self.m };
        let d = match t {
            Type::Nat => (0..=top).map(CV::N).collect(),
            Type::Seq(e) if **e == Type::Nat => subsets(top),
            Type::Arrow(a, b) if **a == Type::Nat && st => {
                let vals = self.domain(b, true)?;
                let default = match &**b {
                    Type::Nat => CV::N(0),
                    _ => CV::L(Rc::new(vec![])),
                };
                // every choice of a value for each standard argument
                let mut out: Vec<Vec<CV>> = vec![vec![]];
                for _ in 0..=self.k {
                    let mut next = Vec::new();
                    for f in &out {
                        for v in vals.iter() {
                            let mut g = f.clone();
                            g.push(v.clone());
                            next.push(g);
                        }
                    }
                    out = next;
                }
                out.into_iter()
                    .map(|mut f| {
                        f.resize(self.m as usize + 1, default.clone());
                        CV::F(Rc::new(f))
                    })
                    .collect()
            }
            _ => {
                let q = if st { "standard" } else { "internal" };
                return unsupported(format!("{q} quantification over {t}"));
            }
        };
        let d = Rc::new(d);
        self.domains.borrow_mut().insert((t.clone(), st), d.clone());
        Ok(d)
    }

    fn term(&self, t: &Term, env: &[(String, CV)]) -> R<CV> {
        match t {
            Term::Var(x) => env
                .iter()
                .rev()
                .find(|(y, _)| y == x)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Stop::Fail(VerifyError::Unbound(x.clone()))),
            Term::Zero => Ok(CV::N(0)),
            Term::Succ(a) => Ok(CV::N(self.nat(a, env)? + 1)),
            Term::App(f, a) => {
                let CV::F(tab) = self.term(f, env)? else {
                    return unsupported(format!("application {}", print_term(t)));
                };
                let n = self.nat(a, env)?;
                tab.get(n as usize).cloned().ok_or_else(|| {
                    Stop::Fail(VerifyError::Shape(format!(
                        "argument {n} outside the world"
                    )))
                })
            }
            Term::Len(l) => match self.term(l, env)? {
                CV::L(v) => Ok(CV::N(v.len() as u64)),
                _ => unsupported(format!("len of {}", print_term(l))),
            },
            Term::Idx(l, i) => {
                let i = self.nat(i, env)?;
                match self.term(l, env)? {
                    CV::L(v) => v.get(i as usize).map(|x| CV::N(*x)).ok_or_else(|| {
                        Stop::Fail(VerifyError::Shape(format!("index {i} out of range")))
                    }),
                    _ => unsupported(format!("idx into {}", print_term(l))),
                }
            }
            _ => unsupported(format!("the term {}", print_term(t))),
        }
    }

    fn nat(&self, t: &Term, env: &[(String, CV)]) -> R<u64> {
        match self.term(t, env)? {
            CV::N(n) => Ok(n),
            _ => unsupported(format!("{} as a number", print_term(t))),
        }
    }

    fn is_st(&self, v: &CV) -> bool {
        match v {
            CV::N(n) => *n <= self.k,
            CV::L(l) => l.iter().all(|x| *x <= self.k),
            CV::F(f) => f.iter().take(self.k as usize + 1).all(|v| self.is_st(v)),
        }
    }

    fn formula(&self, f: &Formula, env: &mut Vec<(String, CV)>) -> R<bool> {
        match f {
            Formula::Eq0(a, b) => Ok(self.nat(a, env)? == self.nat(b, env)?),
            Formula::Le0(a, b) => Ok(self.nat(a, env)? <= self.nat(b, env)?),
            Formula::Atom(name, args) => {
                let Some(ti) = self.tables.iter().position(|t| t.name == *name) else {
                    return Err(Stop::Fail(VerifyError::UndecidableAtom(name.clone())));
                };
                let mut cell = 0usize;
                for a in args {
                    let n = self.nat(a, env)?;
                    if n > self.m {
                        return Ok(false);
                    }
                    cell = cell * (self.m as usize + 1) + n as usize;
                }
                match self.tables[ti].cells[cell] {
                    Some(b) => Ok(b),
                    None => Err(Stop::Need(ti, cell)),
                }
            }
            Formula::St(t) => {
                let v = self.term(t, env)?;
                Ok(self.is_st(&v))
            }
            Formula::And(a, b) => Ok(self.formula(a, env)? && self.formula(b, env)?),
            Formula::Or(a, b) => Ok(self.formula(a, env)? || self.formula(b, env)?),
            Formula::Imp(a, b) => Ok(!self.formula(a, env)? || self.formula(b, env)?),
            Formula::Not(a) => Ok(!self.formula(a, env)?),
            Formula::Forall(x, t, b)
            | Formula::Exists(x, t, b)
            | Formula::ForallSt(x, t, b)
            | Formula::ExistsSt(x, t, b) => {
                let (q, _, _, _) = f.as_quant().unwrap();
                let universal = q.is_universal();
                for v in self.domain(t, q.is_st())?.iter() {
                    env.push((x.clone(), v.clone()));
                    let r = self.formula(b, env);
                    env.pop();
                    if r? != universal {
                        return Ok(!universal);
                    }
                }
                Ok(universal)
            }
            _ => unsupported(format!("{} (unfold abbreviations first)", print_formula(f))),
        }
    }

    fn show_tables(&self) -> String {
        self.tables
            .iter()
            .map(|t| {
                let w = self.m as usize + 1;
                let tuples: Vec<String> = t
                    .cells
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c == Some(true))
                    .map(|(i, _)| {
                        let mut parts = Vec::new();
                        let mut rest = i;
                        for _ in 0..t.arity {
                            parts.push((rest % w).to_string());
                            rest /= w;
                        }
                        parts.reverse();
                        if parts.len() == 1 {
                            parts.remove(0)
                        } else {
                            format!("({})", parts.join(","))
                        }
                    })
                    .collect();
                format!("{} = {{{}}}", t.name, tuples.join(", "))
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// An axiom schema instance over table atoms.
#[derive(Clone, Debug)]
pub struct Schema {
    pub name: &'static str,
    /// Declarations of the table atoms and free parameters (`Nat` only).
    pub preamble: &'static str,
    pub premise: &'static str,
    /// Hand-written conclusion.
    pub conclusion: &'static str,
    /// Rewrite rule whose output on the premise is checked as well.
    pub rule: Option<&'static str>,
    pub mode: Mode,
    /// Also check conclusion -> premise.
    pub two_way: bool,
    /// Whether the schema is expected to survive every table.
    pub expect_valid: bool,
}

const PHI2: &str = "(declare-atom phi (Nat Nat))\n(declare-atom psi (Nat))\n";
const PARAM: &str =
    "(declare-atom phi (Nat Nat))\n(declare-atom psi (Nat Nat))\n(declare-var a Nat)\n";

/// Idealisation, HAC_int, NCR, HGMP, HIP, overspill and full Transfer.
pub fn schemas() -> Vec<Schema> {
    vec![
        Schema {
            name: "I",
            preamble: PHI2,
            premise: "(forall (y Nat) (exists-st (x Nat) (atom phi x y)))",
            conclusion: "(exists-st (xs (Seq Nat)) (forall (y Nat) (exists (i Nat) (and (le0 (succ i) (len xs)) (atom phi (idx xs i) y)))))",
            rule: Some("idealize"),
            mode: Mode::P,
            two_way: true,
            expect_valid: true,
        },
        Schema {
            name: "HAC",
            preamble: PHI2,
            premise: "(forall-st (x Nat) (exists-st (y Nat) (atom phi x y)))",
            conclusion: "(exists-st (G (-> Nat (Seq Nat))) (forall-st (x Nat) (exists (i Nat) (and (le0 (succ i) (len (app G x))) (atom phi x (idx (app G x) i))))))",
            rule: Some("hac"),
            mode: Mode::P,
            two_way: true,
            expect_valid: true,
        },
        Schema {
            name: "NCR",
            preamble: PHI2,
            premise: "(forall (y Nat) (exists-st (x Nat) (or (atom phi x y) (forall-st (z Nat) (atom psi z)))))",
            conclusion: "(exists-st (xs (Seq Nat)) (forall (y Nat) (exists (i Nat) (and (le0 (succ i) (len xs)) (or (atom phi (idx xs i) y) (forall-st (z Nat) (atom psi z)))))))",
            rule: Some("ncr"),
            mode: Mode::H,
            two_way: false,
            expect_valid: true,
        },
        Schema {
            name: "HGMP",
            preamble: PARAM,
            premise: "(imp (forall-st (x Nat) (atom phi x a)) (atom psi a a))",
            conclusion: "(exists-st (xs (Seq Nat)) (imp (forall (i Nat) (imp (le0 (succ i) (len xs)) (atom phi (idx xs i) a))) (atom psi a a)))",
            rule: Some("hgmp"),
            mode: Mode::H,
            two_way: false,
            expect_valid: true,
        },
        Schema {
            name: "HIP",
            preamble: PARAM,
            premise: "(imp (forall-st (x Nat) (atom phi x a)) (exists-st (y Nat) (atom psi y a)))",
            conclusion: "(exists-st (ys (Seq Nat)) (imp (forall-st (x Nat) (atom phi x a)) (exists (i Nat) (and (le0 (succ i) (len ys)) (atom psi (idx ys i) a)))))",
            rule: Some("hip"),
            mode: Mode::H,
            two_way: false,
            expect_valid: true,
        },
        Schema {
            name: "OS",
            preamble: PARAM,
            premise: "(forall-st (x Nat) (atom phi x a))",
            conclusion: "(exists (y Nat) (and (not (st y)) (atom phi y a)))",
            rule: Some("overspill"),
            mode: Mode::P,
            two_way: false,
            expect_valid: true,
        },
        Schema {
            name: "T",
            preamble: "(declare-atom phi (Nat))\n",
            premise: "(forall-st (n Nat) (atom phi n))",
            conclusion: "(forall (n Nat) (atom phi n))",
            rule: None,
            mode: Mode::P,
            two_way: false,
            expect_valid: false,
        },
    ]
}

pub fn schema(name: &str) -> Result<Schema, VerifyError> {
    let key = match name {
        "idealize" | "idealisation" | "I" => "I",
        "hac" | "HAC" | "HAC_int" => "HAC",
        "ncr" | "NCR" => "NCR",
        "hgmp" | "HGMP" => "HGMP",
        "hip" | "HIP" => "HIP",
        "os" | "OS" | "overspill" => "OS",
        "T" | "transfer" | "Transfer" => "T",
        other => return Err(VerifyError::UnknownSchema(other.into())),
    };
    Ok(schemas().into_iter().find(|s| s.name == key).unwrap())
}

#[derive(Clone, Debug)]
pub struct CutoffOptions {
    /// Largest number of finished branches per assignment before sampling.
    pub branch_budget: u64,
    /// Number of fixed-seed random tables drawn once the budget is hit;
    /// `None` turns the overflow into an error instead.
    pub samples: Option<u64>,
    pub seed: u64,
}

impl Default for CutoffOptions {
    fn default() -> Self {
        CutoffOptions {
            branch_budget: 1 << 22,
            samples: Some(4096),
            seed: 0,
        }
    }
}

struct Instance {
    sig: Signature,
    premise: Formula,
    /// Hand-written conclusion first, then the rewrite rule's output.
    conclusions: Vec<(String, Formula)>,
    params: Vec<String>,
}

fn instance(s: &Schema) -> Result<Instance, VerifyError> {
    let d = parse_document(&format!("{}(eq0 0 0)", s.preamble))
        .map_err(|e| VerifyError::Shape(e.to_string()))?;
    let sig = d.sig;
    let parse = |t: &str| parse_formula(t, &sig).map_err(|e| VerifyError::Shape(e.to_string()));
    let premise = parse(s.premise)?;
    let mut conclusions = vec![("schema".to_string(), parse(s.conclusion)?)];
    if let Some(rule) = s.rule {
        let e = Engine::new(sig.clone(), s.mode);
        let out = apply_rule(&e, &premise, rule, &[], &[])
            .map_err(|e| VerifyError::Shape(e.to_string()))?;
        conclusions.push((format!("rule {rule}"), out));
    }
    let params = sig.vars.iter().map(|(n, _)| n.clone()).collect();
    Ok(Instance {
        sig,
        premise,
        conclusions,
        params,
    })
}

/// Total number of tables for the declared atoms at world size `m`.
fn table_bits(sig: &Signature, m: u64) -> u32 {
    sig.atoms
        .iter()
        .map(|a| (m as u32 + 1).pow(a.sorts.len() as u32))
        .sum()
}

/// The closed-form instance count: tables times parameter assignments.
pub fn instance_count(s: &Schema, m: u64) -> Result<u128, VerifyError> {
    let inst = instance(s)?;
    let bits = table_bits(&inst.sig, m);
    Ok((1u128 << bits) * (m as u128 + 1).pow(inst.params.len() as u32))
}

/// Checks `premise -> conclusion` (and back, for two-way schemas) at every
/// size `(K, M)` given, over all tables and parameter values.
pub fn cutoff_check(
    s: &Schema,
    sizes: &[(u64, u64)],
    opts: &CutoffOptions,
) -> Result<VerificationReport, VerifyError> {
    let inst = instance(s)?;
    let mut report = VerificationReport::default();
    for &(k, m) in sizes {
        if k >= m {
            return Err(VerifyError::Shape(format!(
                "cutoff K={k} must be below M={m}"
            )));
        }
        let bits = table_bits(&inst.sig, m);
        let assignments = (m + 1).pow(inst.params.len() as u32);
        let mut covered: u128 = 0;
        for code in 0..assignments {
            let mut env = Vec::new();
            let mut rest = code;
            for p in &inst.params {
                env.push((p.clone(), CV::N(rest % (m + 1))));
                rest /= m + 1;
            }
            let mut world = World {
                k,
                m,
                tables: inst
                    .sig
                    .atoms
                    .iter()
                    .map(|a| Table {
                        name: a.name.clone(),
                        arity: a.sorts.len(),
                        cells: vec![None; (m as usize + 1).pow(a.sorts.len() as u32)],
                    })
                    .collect(),
                domains: RefCell::new(HashMap::new()),
            };
            let mut branches = 0u64;
            let res = enumerate(
                &mut world,
                &inst,
                s.two_way,
                &env,
                &mut branches,
                opts.branch_budget,
                &mut |w, ok, free| {
                    covered += 1u128 << free;
                    report.instances += 1u128 << free;
                    if !ok {
                        report.failed += 1u128 << free;
                        if report.failures.len() < 16 {
                            report.failures.push(failure(w, k, m, &env));
                        }
                    }
                },
            );
            report.steps += branches;
            match res {
                Ok(()) => {}
                Err(Stop::Need(..)) => unreachable!(),
                Err(Stop::Fail(VerifyError::SizeBudgetExceeded(msg))) => {
                    let Some(n) = opts.samples else {
                        return Err(VerifyError::SizeBudgetExceeded(msg));
                    };
                    report.sampled = true;
                    sample(
                        &mut world,
                        &inst,
                        s.two_way,
                        &env,
                        n,
                        opts.seed,
                        &mut report,
                    )?;
                    covered = u128::MAX;
                }
                Err(Stop::Fail(e)) => return Err(e),
            }
        }
        if covered != u128::MAX && covered != (1u128 << bits) * assignments as u128 {
            return Err(VerifyError::Shape(format!(
                "enumeration covered {covered} instances at K={k} M={m}, expected 2^{bits} x {assignments}"
            )));
        }
    }
    Ok(report)
}

fn failure(w: &World, k: u64, m: u64, env: &[(String, CV)]) -> Failure {
    let mut parts = vec![format!("K={k} M={m}")];
    for (p, v) in env {
        if let CV::N(n) = v {
            parts.push(format!("{p}={n}"));
        }
    }
    Failure {
        assignment: parts.join(" "),
        detail: format!("{} (unread cells false)", w.show_tables()),
    }
}

fn holds(w: &World, inst: &Instance, two_way: bool, env: &[(String, CV)]) -> R<bool> {
    let mut env = env.to_vec();
    let p = w.formula(&inst.premise, &mut env)?;
    for (_, c) in &inst.conclusions {
        let q = w.formula(c, &mut env)?;
        if (p && !q) || (two_way && q && !p) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    w: &mut World,
    inst: &Instance,
    two_way: bool,
    env: &[(String, CV)],
    branches: &mut u64,
    budget: u64,
    leaf: &mut dyn FnMut(&World, bool, u32),
) -> R<()> {
    match holds(w, inst, two_way, env) {
        Ok(ok) => {
            *branches += 1;
            if *branches > budget {
                return Err(Stop::Fail(VerifyError::SizeBudgetExceeded(format!(
                    "more than {budget} table branches"
                ))));
            }
            let free = w
                .tables
                .iter()
                .map(|t| t.cells.iter().filter(|c| c.is_none()).count() as u32)
                .sum();
            leaf(w, ok, free);
            Ok(())
        }
        Err(Stop::Need(t, c)) => {
            for b in [false, true] {
                w.tables[t].cells[c] = Some(b);
                let r = enumerate(w, inst, two_way, env, branches, budget, leaf);
                if r.is_err() {
                    w.tables[t].cells[c] = None;
                    return r;
                }
            }
            w.tables[t].cells[c] = None;
            Ok(())
        }
        Err(e) => Err(e),
    }
}

fn sample(
    w: &mut World,
    inst: &Instance,
    two_way: bool,
    env: &[(String, CV)],
    n: u64,
    seed: u64,
    report: &mut VerificationReport,
) -> Result<(), VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        for t in &mut w.tables {
            for c in &mut t.cells {
                *c = Some(rng.gen());
            }
        }
        report.instances += 1;
        match holds(w, inst, two_way, env) {
            Ok(true) => {}
            Ok(false) => {
                report.failed += 1;
                if report.failures.len() < 16 {
                    report.failures.push(failure(w, w.k, w.m, env));
                }
            }
            Err(Stop::Fail(e)) => return Err(e),
            Err(Stop::Need(..)) => unreachable!(),
        }
    }
    Ok(())
}

/// Every `(K, M)` with `K <= max_k`, `K < M <= max_m`.
pub fn sizes_up_to(max_k: u64, max_m: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for k in 0..=max_k {
        for m in k + 1..=max_m {
            out.push((k, m));
        }
    }
    out
}
