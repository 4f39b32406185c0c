//! Seeded generator of well-typed random terms and formulas.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ast::*;
use super::parse::parse_document;

const SIG_TEXT: &str = "\
(declare-sort Real)
(declare-atom lt-inv-dist (Real Real Nat) :decidable :antitone 2)
(declare-atom lt-inv-abs (Real Nat) :decidable :antitone 1)
(declare-atom p (Nat) :decidable)
(declare-atom q (Nat Nat) :decidable :monotone 1)
(declare-atom r (Real Nat) :decidable)
(eq0 0 0)
";

/// The signature random formulas are drawn over.
pub fn gen_signature() -> Signature {
    parse_document(SIG_TEXT).unwrap().sig
}

pub struct Gen {
    rng: ChaCha8Rng,
    sig: Signature,
    counter: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sig: gen_signature(),
            counter: 0,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn name(&mut self, base: &str) -> String {
        // Occasional reuse of a name exercises shadowing.
        if self.counter > 0 && self.rng.gen_ratio(1, 8) {
            return format!("{base}{}", self.rng.gen_range(0..self.counter));
        }
        self.counter += 1;
        format!("{base}{}", self.counter - 1)
    }

    pub fn gen_type(&mut self, depth: usize) -> Type {
        if depth == 0 {
            return Type::Nat;
        }
        match self.rng.gen_range(0..6) {
            0 | 1 => Type::Nat,
            2 => Type::Sort("Real".into()),
            3 => Type::seq(self.gen_type(depth - 1)),
            _ => Type::arrow(self.gen_type(depth - 1), self.gen_type(depth - 1)),
        }
    }

    fn var_of(&mut self, ty: &Type, ctx: &[(String, Type)]) -> Option<Term> {
        // Only the innermost binding of each name is visible.
        let vis: Vec<&String> = ctx
            .iter()
            .enumerate()
            .filter(|(i, (n, t))| t == ty && !ctx[i + 1..].iter().any(|(m, _)| m == n))
            .map(|(_, (n, _))| n)
            .collect();
        vis.choose(&mut self.rng).map(|n| Term::var(n))
    }

    /// A closed-under-`ctx` term of type `ty` with nesting at most `depth`.
    pub fn gen_term(&mut self, ty: &Type, ctx: &mut Vec<(String, Type)>, depth: usize) -> Term {
        if self.rng.gen_ratio(1, 3) {
            if let Some(v) = self.var_of(ty, ctx) {
                return v;
            }
        }
        let d = depth.saturating_sub(1);
        match ty {
            Type::Nat => {
                if depth == 0 {
                    return Term::numeral(self.rng.gen_range(0..4));
                }
                match self.rng.gen_range(0..8) {
                    0 => Term::numeral(self.rng.gen_range(0..6)),
                    1 => Term::succ(self.gen_term(ty, ctx, d)),
                    2 => {
                        let a = self.gen_type(1);
                        let f = self.gen_term(&Type::arrow(a.clone(), Type::Nat), ctx, d);
                        Term::app(f, self.gen_term(&a, ctx, d))
                    }
                    3 => Term::len(self.gen_term(&Type::seq(Type::Nat), ctx, d)),
                    4 => Term::idx(
                        self.gen_term(&Type::seq(Type::Nat), ctx, d),
                        self.gen_term(&Type::Nat, ctx, d),
                    ),
                    5 => Term::max_nat(self.gen_term(&Type::seq(Type::Nat), ctx, d)),
                    6 => {
                        let n = self.name("m");
                        let r = self.name("r");
                        ctx.push((n.clone(), Type::Nat));
                        ctx.push((r.clone(), Type::Nat));
                        let body = self.gen_term(&Type::Nat, ctx, d.saturating_sub(1));
                        ctx.pop();
                        ctx.pop();
                        let step = Term::lam(&n, Type::Nat, Term::lam(&r, Type::Nat, body));
                        Term::Rec(
                            Type::Nat,
                            Box::new(self.gen_term(&Type::Nat, ctx, d)),
                            Box::new(step),
                            Box::new(self.gen_term(&Type::Nat, ctx, d)),
                        )
                    }
                    _ => Term::Zero,
                }
            }
            Type::Sort(s) => match self.var_of(ty, ctx) {
                Some(v) => v,
                None => Term::idx(Term::Nil(Type::Sort(s.clone())), Term::Zero),
            },
            Type::Arrow(a, b) => {
                let x = self.name("x");
                ctx.push((x.clone(), (**a).clone()));
                let body = self.gen_term(b, ctx, d);
                ctx.pop();
                Term::lam(&x, (**a).clone(), body)
            }
            Type::Seq(e) => {
                if depth == 0 {
                    return Term::Nil((**e).clone());
                }
                match self.rng.gen_range(0..5) {
                    0 => Term::Nil((**e).clone()),
                    1 | 2 => Term::cons(self.gen_term(e, ctx, d), self.gen_term(ty, ctx, d)),
                    3 => Term::Append(
                        Box::new(self.gen_term(ty, ctx, d)),
                        Box::new(self.gen_term(ty, ctx, d)),
                    ),
                    _ => Term::Prefix(
                        Box::new(self.gen_term(ty, ctx, d)),
                        Box::new(self.gen_term(&Type::Nat, ctx, d)),
                    ),
                }
            }
        }
    }

    /// A well-typed formula of nesting depth at most `depth`.
    pub fn gen_formula(&mut self, ctx: &mut Vec<(String, Type)>, depth: usize) -> Formula {
        let nat = Type::Nat;
        let real = Type::Sort("Real".into());
        let td = depth.min(2);
        let pick = if depth <= 1 {
            self.rng.gen_range(0..5)
        } else {
            self.rng.gen_range(0..15)
        };
        let d = depth.saturating_sub(1);
        match pick {
            0 => Formula::Eq0(self.gen_term(&nat, ctx, td), self.gen_term(&nat, ctx, td)),
            1 => Formula::Le0(self.gen_term(&nat, ctx, td), self.gen_term(&nat, ctx, td)),
            2 => {
                let decl = self.sig.atoms.choose(&mut self.rng).unwrap().clone();
                let args = decl
                    .sorts
                    .iter()
                    .map(|s| self.gen_term(s, ctx, td))
                    .collect();
                Formula::Atom(decl.name, args)
            }
            3 => {
                let ty = self.gen_type(1);
                Formula::St(self.gen_term(&ty, ctx, td))
            }
            4 => Formula::Approx(self.gen_term(&real, ctx, td), self.gen_term(&real, ctx, td)),
            5 => Formula::and(self.gen_formula(ctx, d), self.gen_formula(ctx, d)),
            6 => Formula::or(self.gen_formula(ctx, d), self.gen_formula(ctx, d)),
            7 | 8 => Formula::imp(self.gen_formula(ctx, d), self.gen_formula(ctx, d)),
            9 => Formula::not(self.gen_formula(ctx, d)),
            10 => {
                let x = self.name("n");
                ctx.push((x.clone(), nat));
                let b = self.gen_formula(ctx, d);
                ctx.pop();
                Formula::ForallOmega(x, Box::new(b))
            }
            11 => {
                let x = self.name("e");
                ctx.push((x.clone(), real));
                let b = self.gen_formula(ctx, d);
                ctx.pop();
                Formula::ForallInf(x, Box::new(b))
            }
            _ => {
                let q = *[
                    Quant::Forall,
                    Quant::Exists,
                    Quant::ForallSt,
                    Quant::ExistsSt,
                ]
                .choose(&mut self.rng)
                .unwrap();
                let ty = self.gen_type(2);
                let x = self.name("v");
                ctx.push((x.clone(), ty.clone()));
                let b = self.gen_formula(ctx, d);
                ctx.pop();
                q.build(x, ty, b)
            }
        }
    }

    pub fn gen_closed_formula(&mut self, depth: usize) -> Formula {
        self.gen_formula(&mut Vec::new(), depth)
    }
}

/// Term depth measured in constructor nesting.
pub fn term_depth(t: &Term) -> usize {
    1 + super::alpha::term_children(t)
        .into_iter()
        .map(term_depth)
        .max()
        .unwrap_or(0)
}

/// Formula depth in formula constructors.
pub fn formula_depth(f: &Formula) -> usize {
    1 + f
        .children()
        .into_iter()
        .map(formula_depth)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::typing::{check_formula, Ctx};

    #[test]
    fn generated_formulas_type_check() {
        let mut g = Gen::new(7);
        let sig = g.signature().clone();
        for _ in 0..300 {
            let f = g.gen_closed_formula(7);
            assert!(formula_depth(&f) <= 7);
            check_formula(&f, &sig, &Ctx::new()).unwrap();
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let a = Gen::new(3).gen_closed_formula(6);
        let b = Gen::new(3).gen_closed_formula(6);
        assert_eq!(a, b);
    }
}
