use super::alpha::substitute;
use super::ast::*;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    TypeMismatch {
        context: String,
        expected: String,
        found: String,
    },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("missing atom declaration `{0}`")]
    MissingAtomDecl(String),
}

fn mismatch(context: &str, expected: impl ToString, found: impl ToString) -> TypeError {
    TypeError::TypeMismatch {
        context: context.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// Typing context: a stack of `(binder, type)`, innermost last.
#[derive(Clone, Debug, Default)]
pub struct Ctx {
    entries: Vec<(String, Type)>,
}

impl Ctx {
    pub fn new() -> Ctx {
        Ctx::default()
    }

    pub fn from_sig(sig: &Signature) -> Ctx {
        Ctx {
            entries: sig.vars.clone(),
        }
    }

    pub fn with(mut self, x: &str, t: Type) -> Ctx {
        self.push(x, t);
        self
    }

    pub fn push(&mut self, x: &str, t: Type) {
        self.entries.push((x.to_string(), t));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn get(&self, x: &str) -> Option<&Type> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, t)| t)
    }
}

/// Name of the atom used to unfold `approx`: `|t - s| < 1/n`.
pub const DIST_ATOM: &str = "lt-inv-dist";
/// Name of the atom used to unfold `forall-inf`: `|e| < 1/n`.
pub const ABS_ATOM: &str = "lt-inv-abs";

/// The binder type of `forall-inf`, read off the declaration of [`ABS_ATOM`].
pub fn infinitesimal_sort(sig: &Signature) -> Result<Type, TypeError> {
    match sig.atom(ABS_ATOM) {
        Some(d) if d.sorts.len() == 2 && d.sorts[1] == Type::Nat => Ok(d.sorts[0].clone()),
        Some(_) => Err(TypeError::MissingAtomDecl(format!(
            "{ABS_ATOM} with sorts (S Nat)"
        ))),
        None => Err(TypeError::MissingAtomDecl(ABS_ATOM.into())),
    }
}

pub fn infer_type(t: &Term, ctx: &Ctx) -> Result<Type, TypeError> {
    let mut c = ctx.clone();
    infer(t, &mut c)
}

fn expect(t: &Term, want: &Type, ctx: &mut Ctx, what: &str) -> Result<(), TypeError> {
    let got = infer(t, ctx)?;
    if &got != want {
        return Err(mismatch(what, want, got));
    }
    Ok(())
}

fn seq_elem(t: &Term, ctx: &mut Ctx, what: &str) -> Result<Type, TypeError> {
    match infer(t, ctx)? {
        Type::Seq(e) => Ok(*e),
        other => Err(mismatch(what, "(Seq _)", other)),
    }
}

fn infer(t: &Term, ctx: &mut Ctx) -> Result<Type, TypeError> {
    match t {
        Term::Var(x) => ctx
            .get(x)
            .cloned()
            .ok_or_else(|| TypeError::UnboundVariable(x.clone())),
        Term::Lam(x, ty, b) => {
            ctx.push(x, ty.clone());
            let r = infer(b, ctx);
            ctx.pop();
            Ok(Type::arrow(ty.clone(), r?))
        }
        Term::App(f, a) => match infer(f, ctx)? {
            Type::Arrow(dom, cod) => {
                expect(a, &dom, ctx, "application argument")?;
                Ok(*cod)
            }
            other => Err(mismatch("application", "(-> _ _)", other)),
        },
        Term::Zero => Ok(Type::Nat),
        Term::Succ(a) => {
            expect(a, &Type::Nat, ctx, "succ")?;
            Ok(Type::Nat)
        }
        Term::Rec(rho, f, g, n) => {
            expect(f, rho, ctx, "rec base")?;
            let step = Type::arrow(Type::Nat, Type::arrow(rho.clone(), rho.clone()));
            expect(g, &step, ctx, "rec step")?;
            expect(n, &Type::Nat, ctx, "rec index")?;
            Ok(rho.clone())
        }
        Term::Nil(e) => Ok(Type::seq(e.clone())),
        Term::Cons(h, tl) => {
            let e = infer(h, ctx)?;
            expect(tl, &Type::seq(e.clone()), ctx, "cons tail")?;
            Ok(Type::seq(e))
        }
        Term::Append(s, u) => {
            let e = seq_elem(s, ctx, "append")?;
            expect(u, &Type::seq(e.clone()), ctx, "append")?;
            Ok(Type::seq(e))
        }
        Term::Len(s) => {
            seq_elem(s, ctx, "len")?;
            Ok(Type::Nat)
        }
        Term::Idx(s, i) => {
            let e = seq_elem(s, ctx, "idx")?;
            expect(i, &Type::Nat, ctx, "idx position")?;
            Ok(e)
        }
        Term::Prefix(s, n) => {
            let e = seq_elem(s, ctx, "prefix")?;
            expect(n, &Type::Nat, ctx, "prefix length")?;
            Ok(Type::seq(e))
        }
        Term::MaxNat(s) => {
            expect(s, &Type::seq(Type::Nat), ctx, "max")?;
            Ok(Type::Nat)
        }
    }
}

/// Checks that a formula is well typed under `sig` and `ctx`.
pub fn check_formula(f: &Formula, sig: &Signature, ctx: &Ctx) -> Result<(), TypeError> {
    let mut c = ctx.clone();
    check(f, sig, &mut c)
}

/// Checks a closed-up-to-parameters formula against its signature.
pub fn check_document(d: &Document) -> Result<(), TypeError> {
    check_formula(&d.formula, &d.sig, &Ctx::from_sig(&d.sig))
}

fn check(f: &Formula, sig: &Signature, ctx: &mut Ctx) -> Result<(), TypeError> {
    match f {
        Formula::Eq0(a, b) | Formula::Le0(a, b) => {
            expect(a, &Type::Nat, ctx, "eq0/le0")?;
            expect(b, &Type::Nat, ctx, "eq0/le0")
        }
        Formula::Approx(a, b) => {
            let d = sig
                .atom(DIST_ATOM)
                .ok_or_else(|| TypeError::MissingAtomDecl(DIST_ATOM.into()))?;
            let ta = infer(a, ctx)?;
            if d.sorts.len() != 3 || d.sorts[0] != ta || d.sorts[1] != ta {
                return Err(mismatch(
                    "approx",
                    format!("{DIST_ATOM} over {ta}"),
                    "other sorts",
                ));
            }
            expect(b, &ta, ctx, "approx")
        }
        Formula::Atom(n, args) => {
            let d = sig
                .atom(n)
                .ok_or_else(|| TypeError::UnknownAtom(n.clone()))?;
            if d.sorts.len() != args.len() {
                return Err(mismatch(
                    &format!("atom {n}"),
                    format!("{} args", d.sorts.len()),
                    args.len(),
                ));
            }
            for (a, s) in args.iter().zip(&d.sorts) {
                expect(a, s, ctx, &format!("atom {n}"))?;
            }
            Ok(())
        }
        Formula::St(t) => infer(t, ctx).map(|_| ()),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            check(a, sig, ctx)?;
            check(b, sig, ctx)
        }
        Formula::Not(a) => check(a, sig, ctx),
        Formula::ForallOmega(x, b) => {
            ctx.push(x, Type::Nat);
            let r = check(b, sig, ctx);
            ctx.pop();
            r
        }
        Formula::ForallInf(x, b) => {
            let ty = infinitesimal_sort(sig)?;
            ctx.push(x, ty);
            let r = check(b, sig, ctx);
            ctx.pop();
            r
        }
        _ => {
            let (_, x, ty, b) = f.as_quant().unwrap();
            ctx.push(x, ty.clone());
            let r = check(b, sig, ctx);
            ctx.pop();
            r
        }
    }
}

/// Substitution with a type check of the replacement against `ty_x`.
pub fn substitute_typed(
    f: &Formula,
    x: &str,
    ty_x: &Type,
    t: &Term,
    ctx: &Ctx,
) -> Result<Formula, TypeError> {
    let ty = infer_type(t, ctx)?;
    if &ty != ty_x {
        return Err(mismatch(&format!("substitution for {x}"), ty_x, ty));
    }
    Ok(substitute(f, x, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_nat() {
        assert_eq!(infer_type(&Term::Zero, &Ctx::new()).unwrap(), Type::Nat);
    }

    #[test]
    fn lambda_succ() {
        let t = Term::lam("x", Type::Nat, Term::succ(Term::var("x")));
        assert_eq!(
            infer_type(&t, &Ctx::new()).unwrap(),
            Type::arrow(Type::Nat, Type::Nat)
        );
    }

    #[test]
    fn recursor_arity() {
        let step = Term::lam(
            "m",
            Type::Nat,
            Term::lam("r", Type::Nat, Term::succ(Term::var("r"))),
        );
        let t = Term::Rec(
            Type::Nat,
            Box::new(Term::Zero),
            Box::new(step.clone()),
            Box::new(Term::var("n")),
        );
        let ctx = Ctx::new().with("n", Type::Nat);
        assert_eq!(infer_type(&t, &ctx).unwrap(), Type::Nat);
        let bad = Term::Rec(
            Type::Nat,
            Box::new(Term::Zero),
            Box::new(Term::lam("m", Type::Nat, Term::Zero)),
            Box::new(Term::var("n")),
        );
        assert!(matches!(
            infer_type(&bad, &ctx),
            Err(TypeError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn errors() {
        assert_eq!(
            infer_type(&Term::var("q"), &Ctx::new()),
            Err(TypeError::UnboundVariable("q".into()))
        );
        let t = Term::app(Term::Zero, Term::Zero);
        assert!(matches!(
            infer_type(&t, &Ctx::new()),
            Err(TypeError::TypeMismatch { .. })
        ));
        let m = Term::max_nat(Term::Nil(Type::seq(Type::Nat)));
        assert!(infer_type(&m, &Ctx::new()).is_err());
    }

    #[test]
    fn typed_substitution() {
        let f = Formula::Eq0(Term::var("x"), Term::Zero);
        let ok = substitute_typed(&f, "x", &Type::Nat, &Term::Zero, &Ctx::new());
        assert!(ok.is_ok());
        let bad = substitute_typed(&f, "x", &Type::Nat, &Term::Nil(Type::Nat), &Ctx::new());
        assert!(matches!(bad, Err(TypeError::TypeMismatch { .. })));
    }
}
