//! Exact rational rule expressions for interpreted atoms and parameters.
//!
//! Grammar: numerals (`3`, `-2`, `1/16`), argument names `x0 x1 ..`,
//! and `(op args..)` with `+ - * / abs pow div mod min max < <= = and or
//! not if`. Division by zero yields `inf`, which only compares.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::syntax::sexp::Sexp;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RExpr {
    Const(BigRational),
    Arg(usize),
    Op(Op, Vec<RExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Abs,
    Pow,
    IDiv,
    Mod,
    Min,
    Max,
    Lt,
    Le,
    Eq,
    And,
    Or,
    Not,
    If,
}

const OPS: &[(&str, Op)] = &[
    ("+", Op::Add),
    ("-", Op::Sub),
    ("*", Op::Mul),
    ("/", Op::Div),
    ("abs", Op::Abs),
    ("pow", Op::Pow),
    ("div", Op::IDiv),
    ("mod", Op::Mod),
    ("min", Op::Min),
    ("max", Op::Max),
    ("<", Op::Lt),
    ("<=", Op::Le),
    ("=", Op::Eq),
    ("and", Op::And),
    ("or", Op::Or),
    ("not", Op::Not),
    ("if", Op::If),
];

/// A rule value: a rational, the point at infinity, or a truth value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RVal {
    Q(BigRational),
    Inf,
    B(bool),
}

impl RVal {
    pub fn int(n: i64) -> RVal {
        RVal::Q(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            RVal::B(b) => Some(*b),
            _ => None,
        }
    }

    /// The value as a natural number, when it is one.
    pub fn as_nat(&self) -> Option<u64> {
        match self {
            RVal::Q(q) if q.is_integer() && !q.is_negative() => q.to_integer().to_u64(),
            _ => None,
        }
    }
}

impl fmt::Display for RVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RVal::Q(q) => write!(f, "{q}"),
            RVal::Inf => write!(f, "inf"),
            RVal::B(b) => write!(f, "{b}"),
        }
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

pub fn parse_rexpr(x: &Sexp) -> Result<RExpr, String> {
    match x {
        Sexp::Atom(s, _) => {
            if let Some(i) = s.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                return Ok(RExpr::Arg(i));
            }
            parse_rational(s)
                .map(RExpr::Const)
                .ok_or_else(|| format!("{}: bad rule atom `{s}`", x.pos()))
        }
        Sexp::List(items, p) => {
            let Some(head) = items.first().and_then(Sexp::as_atom) else {
                return Err(format!("{p}: rule form needs an operator"));
            };
            let Some((_, op)) = OPS.iter().find(|(n, _)| *n == head) else {
                return Err(format!("{p}: unknown rule operator `{head}`"));
            };
            let args = items[1..]
                .iter()
                .map(parse_rexpr)
                .collect::<Result<Vec<_>, _>>()?;
            let n = args.len();
            let ok = match op {
                Op::Abs | Op::Not => n == 1,
                Op::Sub => n == 1 || n == 2,
                Op::Div | Op::Pow | Op::IDiv | Op::Mod | Op::Lt | Op::Le | Op::Eq => n == 2,
                Op::If => n == 3,
                _ => n >= 1,
            };
            if !ok {
                return Err(format!("{p}: `{head}` applied to {n} arguments"));
            }
            Ok(RExpr::Op(*op, args))
        }
        Sexp::Str(_, p) => Err(format!("{p}: strings are not rule expressions")),
    }
}

impl RExpr {
    /// Highest argument index used, plus one.
    pub fn arity(&self) -> usize {
        match self {
            RExpr::Const(_) => 0,
            RExpr::Arg(i) => i + 1,
            RExpr::Op(_, xs) => xs.iter().map(RExpr::arity).max().unwrap_or(0),
        }
    }

    pub fn eval(&self, args: &[RVal]) -> Result<RVal, String> {
        match self {
            RExpr::Const(q) => Ok(RVal::Q(q.clone())),
            RExpr::Arg(i) => args
                .get(*i)
                .cloned()
                .ok_or_else(|| format!("rule uses x{i} but only {} arguments given", args.len())),
            RExpr::Op(op, xs) => {
                // connectives and `if` evaluate lazily
                match op {
                    Op::And => {
                        for x in xs {
                            if !truth(&x.eval(args)?)? {
                                return Ok(RVal::B(false));
                            }
                        }
                        return Ok(RVal::B(true));
                    }
                    Op::Or => {
                        for x in xs {
                            if truth(&x.eval(args)?)? {
                                return Ok(RVal::B(true));
                            }
                        }
                        return Ok(RVal::B(false));
                    }
                    Op::If => {
                        return if truth(&xs[0].eval(args)?)? {
                            xs[1].eval(args)
                        } else {
                            xs[2].eval(args)
                        };
                    }
                    _ => {}
                }
                let vs = xs
                    .iter()
                    .map(|x| x.eval(args))
                    .collect::<Result<Vec<_>, _>>()?;
                apply(*op, vs)
            }
        }
    }
}

fn truth(v: &RVal) -> Result<bool, String> {
    v.as_bool()
        .ok_or_else(|| format!("expected a truth value, found {v}"))
}

fn num(v: RVal) -> Result<BigRational, String> {
    match v {
        RVal::Q(q) => Ok(q),
        other => Err(format!("expected a finite number, found {other}")),
    }
}

fn less(a: &RVal, b: &RVal, strict: bool) -> Result<bool, String> {
    match (a, b) {
        (RVal::Q(x), RVal::Q(y)) => Ok(if strict { x < y } else { x <= y }),
        (RVal::Q(_), RVal::Inf) => Ok(true),
        (RVal::Inf, RVal::Q(_)) => Ok(false),
        (RVal::Inf, RVal::Inf) => Ok(!strict),
        _ => Err(format!("cannot compare {a} and {b}")),
    }
}

fn apply(op: Op, mut vs: Vec<RVal>) -> Result<RVal, String> {
    let q = |v: RVal| num(v);
    Ok(match op {
        Op::Add => {
            let mut acc = BigRational::zero();
            for v in vs {
                acc += q(v)?;
            }
            RVal::Q(acc)
        }
        Op::Mul => {
            let mut acc = BigRational::one();
            for v in vs {
                acc *= q(v)?;
            }
            RVal::Q(acc)
        }
        Op::Sub if vs.len() == 1 => RVal::Q(-q(vs.remove(0))?),
        Op::Sub => {
            let b = q(vs.remove(1))?;
            RVal::Q(q(vs.remove(0))? - b)
        }
        Op::Div => {
            let b = q(vs.remove(1))?;
            let a = q(vs.remove(0))?;
            if b.is_zero() {
                if a.is_positive() {
                    RVal::Inf
                } else {
                    return Err(format!("{a}/0 is undefined"));
                }
            } else {
                RVal::Q(a / b)
            }
        }
        Op::Abs => RVal::Q(q(vs.remove(0))?.abs()),
        Op::Pow => {
            let e = q(vs.remove(1))?;
            let b = q(vs.remove(0))?;
            let e = e
                .to_integer()
                .to_i32()
                .filter(|_| e.is_integer())
                .ok_or("pow needs a small integer exponent")?;
            RVal::Q(num_traits::pow::Pow::pow(b, e))
        }
        Op::IDiv | Op::Mod => {
            let b = q(vs.remove(1))?;
            let a = q(vs.remove(0))?;
            if b.is_zero() {
                return Err("integer division by zero".into());
            }
            let d = (a.clone() / b.clone()).floor();
            if op == Op::IDiv {
                RVal::Q(d)
            } else {
                RVal::Q(a - d * b)
            }
        }
        Op::Min | Op::Max => {
            let mut best = vs.remove(0);
            for v in vs {
                let lt = less(&v, &best, true)?;
                if lt == (op == Op::Min) {
                    best = v;
                }
            }
            best
        }
        Op::Lt => RVal::B(less(&vs[0], &vs[1], true)?),
        Op::Le => RVal::B(less(&vs[0], &vs[1], false)?),
        Op::Eq => RVal::B(vs[0] == vs[1]),
        Op::Not => RVal::B(!truth(&vs[0])?),
        Op::And | Op::Or | Op::If => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::sexp::read_all;

    fn ev(s: &str, args: &[RVal]) -> RVal {
        parse_rexpr(&read_all(s).unwrap()[0])
            .unwrap()
            .eval(args)
            .unwrap()
    }

    fn r(s: &str) -> RVal {
        RVal::Q(parse_rational(s).unwrap())
    }

    #[test]
    fn arithmetic_is_exact() {
        assert_eq!(ev("(+ 1/3 1/6)", &[]), r("1/2"));
        assert_eq!(ev("(* x0 x0)", &[r("3/4")]), r("9/16"));
        assert_eq!(ev("(abs (- x0 x1))", &[r("1/8"), r("1/2")]), r("3/8"));
        assert_eq!(ev("(pow 2 -3)", &[]), r("1/8"));
        assert_eq!(ev("(div 7 2)", &[]), r("3"));
        assert_eq!(ev("(mod 7 2)", &[]), r("1"));
        assert_eq!(ev("(max 1 5/2 2)", &[]), r("5/2"));
        assert_eq!(ev("(if (< 1 2) 10 20)", &[]), r("10"));
    }

    #[test]
    fn division_by_zero_is_infinite() {
        let rule = "(< (abs (- x0 x1)) (/ 1 x2))";
        assert_eq!(ev(rule, &[r("0"), r("1"), r("0")]), RVal::B(true));
        assert_eq!(ev(rule, &[r("0"), r("1/4"), r("4")]), RVal::B(false));
        assert_eq!(ev(rule, &[r("0"), r("3/16"), r("4")]), RVal::B(true));
    }

    #[test]
    fn bad_rules_are_rejected() {
        for s in ["(foo 1)", "(abs 1 2)", "y", "(/ 1)"] {
            assert!(parse_rexpr(&read_all(s).unwrap()[0]).is_err(), "{s}");
        }
    }
}
