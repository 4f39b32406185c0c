//! The mu-operators as declared oracles, and the bounded-search stand-in
//! for the numerical one.

use crate::syntax::alpha::{subst_term, substitute};
use crate::syntax::ast::*;
use crate::syntax::print::print_type;
use crate::syntax::typing::{infer_type, Ctx};

use super::script::Oracle;
use super::{ExtractError, ExtractionResult, OracleParameter, XResult};

pub use super::terms::bounded_mu;

/// The oracle variable available to witness terms after `(oracle MU2)`.
pub const MU_VAR: &str = "mu";
/// The same after `(oracle MU1)`.
pub const MU1_VAR: &str = "mu1";

pub fn mu_type() -> Type {
    Type::arrow(Type::arrow(Type::Nat, Type::Nat), Type::Nat)
}

/// `mu1 : (Seq Nat -> Nat) -> (Nat -> Nat)`; initial segments of a path are
/// finite sequences rather than codes.
pub fn mu1_type() -> Type {
    let f = Type::arrow(Type::seq(Type::Nat), Type::Nat);
    Type::arrow(f, Type::arrow(Type::Nat, Type::Nat))
}

/// `MU(mu)`: `(forall f)((exists n) f n = 0 -> f (mu f) = 0)`.
pub fn mu_spec(mu: &Term) -> Formula {
    let f = Term::var("f");
    let n = Term::var("n");
    Formula::Forall(
        "f".into(),
        Type::arrow(Type::Nat, Type::Nat),
        Box::new(Formula::imp(
            Formula::Exists(
                "n".into(),
                Type::Nat,
                Box::new(Formula::Eq0(Term::app(f.clone(), n), Term::Zero)),
            ),
            Formula::Eq0(Term::app(f.clone(), Term::app(mu.clone(), f)), Term::Zero),
        )),
    )
}

/// `MUO(mu1)`: if some path `g` keeps `f` nonzero on all its initial
/// segments, so does `mu1 f`.
pub fn muo_spec(mu1: &Term) -> Formula {
    let f = Term::var("f");
    let nonzero_along = |path: Term| {
        Formula::Forall(
            "x".into(),
            Type::Nat,
            Box::new(Formula::not(Formula::Eq0(
                Term::app(f.clone(), initial_segment(path, Term::var("x"))),
                Term::Zero,
            ))),
        )
    };
    Formula::Forall(
        "f".into(),
        Type::arrow(Type::seq(Type::Nat), Type::Nat),
        Box::new(Formula::imp(
            Formula::Exists(
                "g".into(),
                Type::arrow(Type::Nat, Type::Nat),
                Box::new(nonzero_along(Term::var("g"))),
            ),
            nonzero_along(Term::app(mu1.clone(), f.clone())),
        )),
    )
}

/// `<g 0, .., g (x-1)>` for `g : Nat -> Nat`.
fn initial_segment(g: Term, x: Term) -> Term {
    let seq = Type::seq(Type::Nat);
    let step = Term::lam(
        "i",
        Type::Nat,
        Term::lam(
            "acc",
            seq.clone(),
            Term::Append(
                Box::new(Term::var("acc")),
                Box::new(Term::singleton(Term::app(g, Term::var("i")), Type::Nat)),
            ),
        ),
    );
    Term::Rec(
        seq,
        Box::new(Term::Nil(Type::Nat)),
        Box::new(step),
        Box::new(x),
    )
}

pub fn oracle_var(o: Oracle) -> &'static str {
    match o {
        Oracle::Mu2 => MU_VAR,
        Oracle::Mu1 => MU1_VAR,
    }
}

pub fn oracle_type(o: Oracle) -> Type {
    match o {
        Oracle::Mu2 => mu_type(),
        Oracle::Mu1 => mu1_type(),
    }
}

pub fn oracle_spec(o: Oracle, t: &Term) -> Formula {
    match o {
        Oracle::Mu2 => mu_spec(t),
        Oracle::Mu1 => muo_spec(t),
    }
}

pub fn oracle_parameter(o: Oracle) -> OracleParameter {
    let name = oracle_var(o);
    OracleParameter {
        name: name.into(),
        ty: oracle_type(o),
        spec: oracle_spec(o, &Term::var(name)),
    }
}

/// `(forall o)(SPEC(o) -> s)`, one layer per oracle, first oracle outermost.
pub fn guard(s: Formula, oracles: &[Oracle]) -> Formula {
    oracles.iter().rev().fold(s, |acc, o| {
        let p = oracle_parameter(*o);
        Formula::Forall(p.name, p.ty, Box::new(Formula::imp(p.spec, acc)))
    })
}

/// Replaces the oracle by `imp` everywhere. The sentence loses its guard and
/// the result is flagged as approximated; the specification is kept, applied
/// to `imp`, so it can be checked on a grid.
pub fn instantiate_oracle(r: &ExtractionResult, imp: &Term) -> XResult<ExtractionResult> {
    if !r.oracle_parameters.iter().any(|p| p.name == MU_VAR) {
        return Ok(r.clone());
    }
    if r.oracle_parameters.len() > 1 {
        return Err(ExtractError::TypeMismatch(
            "only a lone MU2 oracle can be instantiated".into(),
        ));
    }
    let ty = infer_type(imp, &Ctx::new()).map_err(|e| ExtractError::TypeMismatch(e.to_string()))?;
    if ty != mu_type() {
        return Err(ExtractError::TypeMismatch(format!(
            "oracle implementation has type {}, expected {}",
            print_type(&ty),
            print_type(&mu_type())
        )));
    }
    let mut out = r.clone();
    for w in &mut out.witnesses {
        w.witness.term = subst_term(&w.witness.term, MU_VAR, imp);
    }
    let body = match &r.internal_sentence {
        Formula::Forall(x, _, b) if x == MU_VAR => match &**b {
            Formula::Imp(_, s) => (**s).clone(),
            other => other.clone(),
        },
        other => other.clone(),
    };
    out.internal_sentence = substitute(&body, MU_VAR, imp);
    for p in &mut out.oracle_parameters {
        p.spec = mu_spec(imp);
    }
    out.oracle_approximated = true;
    out.oracle_impl = Some(imp.clone());
    out.notes.push(format!(
        "oracle {MU_VAR} replaced by an approximation; its specification is only grid-checked"
    ));
    Ok(out)
}
