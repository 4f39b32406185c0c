//! Call-by-value evaluation of closed terms.

use std::fmt;
use std::rc::Rc;

use crate::syntax::alpha::free_vars_term;
use crate::syntax::ast::{Term, Type};
use crate::syntax::print::print_term;
use crate::syntax::typing::{infer_type, Ctx, TypeError};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("open term: free variable `{0}`")]
    OpenTerm(String),
    #[error("ill-typed term: {0}")]
    IllTyped(String),
    #[error("index {index} out of range for a sequence of length {len}")]
    IndexOutOfRange { index: u64, len: usize },
    #[error("step budget of {0} reductions exhausted")]
    BudgetExceeded(u64),
}

impl From<TypeError> for EvalError {
    fn from(e: TypeError) -> Self {
        EvalError::IllTyped(e.to_string())
    }
}

#[derive(Clone)]
pub enum Value {
    Num(u64),
    Seq(Vec<Value>, Type),
    Closure(Rc<Closure>),
}

pub struct Closure {
    pub binder: String,
    pub body: Rc<Term>,
    pub env: Env,
}

impl Value {
    pub fn as_num(&self) -> Option<u64> {
        match self {
            Value::Num(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[Value]> {
        match self {
            Value::Seq(v, _) => Some(v),
            _ => None,
        }
    }

    /// Reads a first-order value back into a closed term.
    pub fn to_term(&self) -> Option<Term> {
        match self {
            Value::Num(n) => Some(Term::numeral(*n)),
            Value::Seq(xs, ty) => {
                let items = xs.iter().map(Value::to_term).collect::<Option<Vec<_>>>()?;
                Some(Term::list(items, ty.clone()))
            }
            Value::Closure(_) => None,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Num(a), Value::Num(b)) => a == b,
            (Value::Seq(a, _), Value::Seq(b, _)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_term() {
            Some(t) => write!(f, "{}", print_term(&t)),
            None => write!(f, "<closure>"),
        }
    }
}

/// Persistent environment, innermost binding first.
#[derive(Clone, Default)]
pub struct Env(Option<Rc<EnvNode>>);

pub struct EnvNode {
    name: String,
    value: Value,
    next: Env,
}

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    pub fn bind(&self, name: &str, value: Value) -> Env {
        Env(Some(Rc::new(EnvNode {
            name: name.to_string(),
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = &node.next.0;
        }
        None
    }
}

/// A step-counting evaluator.
pub struct Evaluator {
    budget: u64,
    steps: u64,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::new(DEFAULT_BUDGET)
    }
}

impl Evaluator {
    pub fn new(budget: u64) -> Evaluator {
        Evaluator { budget, steps: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(EvalError::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    /// Evaluates `t` with its free variables bound by `env`. No type check.
    pub fn eval(&mut self, t: &Term, env: &Env) -> Result<Value, EvalError> {
        self.tick()?;
        match t {
            Term::Var(x) => env
                .lookup(x)
                .cloned()
                .ok_or_else(|| EvalError::OpenTerm(x.clone())),
            Term::Lam(x, _, b) => Ok(Value::Closure(Rc::new(Closure {
                binder: x.clone(),
                body: Rc::new((**b).clone()),
                env: env.clone(),
            }))),
            Term::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(&fv, av)
            }
            Term::Zero => Ok(Value::Num(0)),
            Term::Succ(_) => {
                let mut k = 0u64;
                let mut cur = t;
                while let Term::Succ(inner) = cur {
                    k += 1;
                    cur = inner;
                }
                let n = self.num(cur, env)?;
                Ok(Value::Num(n + k))
            }
            Term::Rec(_, f, g, n) => {
                let mut acc = self.eval(f, env)?;
                let gv = self.eval(g, env)?;
                let n = self.num(n, env)?;
                for i in 0..n {
                    let gi = self.apply(&gv, Value::Num(i))?;
                    acc = self.apply(&gi, acc)?;
                }
                Ok(acc)
            }
            Term::Nil(ty) => Ok(Value::Seq(Vec::new(), ty.clone())),
            Term::Cons(h, tl) => {
                let hv = self.eval(h, env)?;
                let (mut xs, ty) = self.seq(tl, env)?;
                self.steps += xs.len() as u64;
                xs.insert(0, hv);
                Ok(Value::Seq(xs, ty))
            }
            Term::Append(s, u) => {
                let (mut xs, ty) = self.seq(s, env)?;
                let (ys, _) = self.seq(u, env)?;
                self.steps += ys.len() as u64;
                xs.extend(ys);
                Ok(Value::Seq(xs, ty))
            }
            Term::Len(s) => Ok(Value::Num(self.seq(s, env)?.0.len() as u64)),
            Term::Idx(s, i) => {
                let (xs, _) = self.seq(s, env)?;
                let i = self.num(i, env)?;
                xs.get(i as usize)
                    .cloned()
                    .ok_or(EvalError::IndexOutOfRange {
                        index: i,
                        len: xs.len(),
                    })
            }
            Term::Prefix(s, n) => {
                let (mut xs, ty) = self.seq(s, env)?;
                let n = self.num(n, env)?;
                xs.truncate(n.min(usize::MAX as u64) as usize);
                Ok(Value::Seq(xs, ty))
            }
            Term::MaxNat(s) => {
                let (xs, _) = self.seq(s, env)?;
                let mut m = 0;
                for x in &xs {
                    m = m.max(
                        x.as_num()
                            .ok_or_else(|| EvalError::IllTyped("max of a non-Nat list".into()))?,
                    );
                }
                Ok(Value::Num(m))
            }
        }
    }

    fn num(&mut self, t: &Term, env: &Env) -> Result<u64, EvalError> {
        match self.eval(t, env)? {
            Value::Num(n) => Ok(n),
            _ => Err(EvalError::IllTyped(format!(
                "expected a number from {}",
                print_term(t)
            ))),
        }
    }

    fn seq(&mut self, t: &Term, env: &Env) -> Result<(Vec<Value>, Type), EvalError> {
        match self.eval(t, env)? {
            Value::Seq(xs, ty) => Ok((xs, ty)),
            _ => Err(EvalError::IllTyped(format!(
                "expected a sequence from {}",
                print_term(t)
            ))),
        }
    }

    pub fn apply(&mut self, f: &Value, a: Value) -> Result<Value, EvalError> {
        match f {
            Value::Closure(c) => {
                let env = c.env.bind(&c.binder, a);
                self.eval(&c.body, &env)
            }
            _ => Err(EvalError::IllTyped("application of a non-function".into())),
        }
    }

    pub fn apply_all(&mut self, f: &Value, args: &[Value]) -> Result<Value, EvalError> {
        let mut cur = f.clone();
        for a in args {
            cur = self.apply(&cur, a.clone())?;
        }
        Ok(cur)
    }
}

fn check_closed(t: &Term) -> Result<(), EvalError> {
    match free_vars_term(t).into_iter().next() {
        Some(x) => Err(EvalError::OpenTerm(x)),
        None => Ok(()),
    }
}

/// Normalizes a closed, well-typed term.
pub fn normalize(t: &Term) -> Result<Value, EvalError> {
    normalize_with_budget(t, DEFAULT_BUDGET)
}

pub fn normalize_with_budget(t: &Term, budget: u64) -> Result<Value, EvalError> {
    check_closed(t)?;
    infer_type(t, &Ctx::new())?;
    Evaluator::new(budget).eval(t, &Env::empty())
}

/// The maximum of a `Seq Nat` term; `0` on the empty sequence.
pub fn max_of_list(s: &Term, ctx: &Ctx) -> Result<Term, EvalError> {
    match infer_type(s, ctx)? {
        Type::Seq(e) if *e == Type::Nat => Ok(Term::max_nat(s.clone())),
        other => Err(EvalError::IllTyped(format!(
            "max expects (Seq Nat), found {other}"
        ))),
    }
}

/// Normalizes `f a1 .. an`, which must have a first-order result type.
pub fn apply_closed(f: &Term, args: &[Term]) -> Result<Value, EvalError> {
    let t = Term::apps(f.clone(), args.iter().cloned());
    check_closed(&t)?;
    let ty = infer_type(&t, &Ctx::new())?;
    if matches!(ty, Type::Arrow(..)) {
        return Err(EvalError::IllTyped(format!(
            "application not saturated, result type {ty}"
        )));
    }
    Evaluator::default().eval(&t, &Env::empty())
}
