use std::fmt;

/// Finite types: `Nat`, arrows, finite sequences, plus declared base sorts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Nat,
    /// An abstract base sort introduced by `(declare-sort name)`.
    Sort(String),
    Arrow(Box<Type>, Box<Type>),
    Seq(Box<Type>),
}

impl Type {
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn seq(a: Type) -> Type {
        Type::Seq(Box::new(a))
    }

    /// `a1 -> a2 -> ... -> r`
    pub fn curried(args: &[Type], result: Type) -> Type {
        args.iter()
            .rev()
            .fold(result, |acc, a| Type::arrow(a.clone(), acc))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Type::Nat | Type::Sort(_))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Nat => write!(f, "Nat"),
            Type::Sort(s) => write!(f, "{s}"),
            Type::Arrow(a, b) => write!(f, "(-> {a} {b})"),
            Type::Seq(a) => write!(f, "(Seq {a})"),
        }
    }
}

/// Terms of Gödel's T with finite-sequence combinators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Lam(String, Type, Box<Term>),
    App(Box<Term>, Box<Term>),
    Zero,
    Succ(Box<Term>),
    /// `Rec(rho, base, step, index)`
    Rec(Type, Box<Term>, Box<Term>, Box<Term>),
    Nil(Type),
    Cons(Box<Term>, Box<Term>),
    Append(Box<Term>, Box<Term>),
    Len(Box<Term>),
    Idx(Box<Term>, Box<Term>),
    Prefix(Box<Term>, Box<Term>),
    MaxNat(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn lam(x: &str, ty: Type, body: Term) -> Term {
        Term::Lam(x.to_string(), ty, Box::new(body))
    }

    pub fn lams(binders: &[(String, Type)], body: Term) -> Term {
        binders.iter().rev().fold(body, |acc, (x, t)| {
            Term::Lam(x.clone(), t.clone(), Box::new(acc))
        })
    }

    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }

    pub fn numeral(n: u64) -> Term {
        let mut t = Term::Zero;
        for _ in 0..n {
            t = Term::succ(t);
        }
        t
    }

    /// Returns `Some(n)` when the term is `Succ^n(Zero)`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0;
        let mut t = self;
        loop {
            match t {
                Term::Zero => return Some(n),
                Term::Succ(inner) => {
                    n += 1;
                    t = inner;
                }
                _ => return None,
            }
        }
    }

    pub fn len(t: Term) -> Term {
        Term::Len(Box::new(t))
    }

    pub fn idx(s: Term, i: Term) -> Term {
        Term::Idx(Box::new(s), Box::new(i))
    }

    pub fn cons(h: Term, t: Term) -> Term {
        Term::Cons(Box::new(h), Box::new(t))
    }

    pub fn max_nat(s: Term) -> Term {
        Term::MaxNat(Box::new(s))
    }

    /// `<t>` of the given element type.
    pub fn singleton(t: Term, elem: Type) -> Term {
        Term::cons(t, Term::Nil(elem))
    }

    pub fn list(items: Vec<Term>, elem: Type) -> Term {
        items
            .into_iter()
            .rev()
            .fold(Term::Nil(elem), |acc, t| Term::cons(t, acc))
    }
}

/// Formulas over typed terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq0(Term, Term),
    Le0(Term, Term),
    Atom(String, Vec<Term>),
    St(Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Forall(String, Type, Box<Formula>),
    Exists(String, Type, Box<Formula>),
    ForallSt(String, Type, Box<Formula>),
    ExistsSt(String, Type, Box<Formula>),
    Approx(Term, Term),
    ForallOmega(String, Box<Formula>),
    ForallInf(String, Box<Formula>),
}

/// Quantifier kinds, used by the block utilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
    ForallSt,
    ExistsSt,
}

impl Quant {
    pub fn is_st(self) -> bool {
        matches!(self, Quant::ForallSt | Quant::ExistsSt)
    }

    pub fn is_universal(self) -> bool {
        matches!(self, Quant::Forall | Quant::ForallSt)
    }

    pub fn dual(self) -> Quant {
        match self {
            Quant::Forall => Quant::Exists,
            Quant::Exists => Quant::Forall,
            Quant::ForallSt => Quant::ExistsSt,
            Quant::ExistsSt => Quant::ForallSt,
        }
    }

    pub fn build(self, x: String, ty: Type, body: Formula) -> Formula {
        let b = Box::new(body);
        match self {
            Quant::Forall => Formula::Forall(x, ty, b),
            Quant::Exists => Formula::Exists(x, ty, b),
            Quant::ForallSt => Formula::ForallSt(x, ty, b),
            Quant::ExistsSt => Formula::ExistsSt(x, ty, b),
        }
    }
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn atom(name: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(name.to_string(), args)
    }

    pub fn quant(q: Quant, x: &str, ty: Type, body: Formula) -> Formula {
        q.build(x.to_string(), ty, body)
    }

    /// Wraps `body` in the given quantifier prefix (outermost first).
    pub fn with_prefix(prefix: &[(Quant, String, Type)], body: Formula) -> Formula {
        prefix
            .iter()
            .rev()
            .fold(body, |acc, (q, x, t)| q.build(x.clone(), t.clone(), acc))
    }

    /// Views a quantifier node as `(kind, binder, type, body)`.
    pub fn as_quant(&self) -> Option<(Quant, &str, &Type, &Formula)> {
        match self {
            Formula::Forall(x, t, b) => Some((Quant::Forall, x, t, b)),
            Formula::Exists(x, t, b) => Some((Quant::Exists, x, t, b)),
            Formula::ForallSt(x, t, b) => Some((Quant::ForallSt, x, t, b)),
            Formula::ExistsSt(x, t, b) => Some((Quant::ExistsSt, x, t, b)),
            _ => None,
        }
    }

    /// Splits off the maximal quantifier prefix.
    pub fn split_prefix(&self) -> (Vec<(Quant, String, Type)>, &Formula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        while let Some((q, x, t, b)) = cur.as_quant() {
            prefix.push((q, x.to_string(), t.clone()));
            cur = b;
        }
        (prefix, cur)
    }

    /// Immediate subformulas, in path order.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => vec![a, b],
            Formula::Not(a)
            | Formula::Forall(_, _, a)
            | Formula::Exists(_, _, a)
            | Formula::ForallSt(_, _, a)
            | Formula::ExistsSt(_, _, a)
            | Formula::ForallOmega(_, a)
            | Formula::ForallInf(_, a) => vec![a],
            _ => vec![],
        }
    }

    /// True when no st-family node occurs.
    pub fn is_internal(&self) -> bool {
        match self {
            Formula::St(_)
            | Formula::ForallSt(..)
            | Formula::ExistsSt(..)
            | Formula::Approx(..)
            | Formula::ForallOmega(..)
            | Formula::ForallInf(..) => false,
            _ => self.children().into_iter().all(Formula::is_internal),
        }
    }

    /// True when no sugar node occurs.
    pub fn is_sugar_free(&self) -> bool {
        match self {
            Formula::Approx(..) | Formula::ForallOmega(..) | Formula::ForallInf(..) => false,
            _ => self.children().into_iter().all(Formula::is_sugar_free),
        }
    }

    /// Names of all atoms, with multiplicity, in left-to-right order.
    pub fn atom_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn go(f: &Formula, out: &mut Vec<String>) {
            if let Formula::Atom(n, _) = f {
                out.push(n.clone());
            }
            for c in f.children() {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }
}

/// Classification of a formula: true iff it contains no st-family node.
pub fn classify_internal(f: &Formula) -> bool {
    f.is_internal()
}

/// Declaration of an atomic predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomDecl {
    pub name: String,
    pub sorts: Vec<Type>,
    pub decidable: bool,
    /// Argument positions in which truth grows with the argument.
    pub monotone: Vec<usize>,
    /// Argument positions in which truth shrinks as the argument grows.
    pub antitone: Vec<usize>,
}

impl AtomDecl {
    pub fn new(name: &str, sorts: Vec<Type>) -> AtomDecl {
        AtomDecl {
            name: name.to_string(),
            sorts,
            decidable: true,
            monotone: vec![],
            antitone: vec![],
        }
    }
}

/// The preamble of a document: sorts, atoms and typed parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub sorts: Vec<String>,
    pub atoms: Vec<AtomDecl>,
    /// Globally declared parameters (`declare-var`), free in formulas.
    pub vars: Vec<(String, Type)>,
}

impl Signature {
    pub fn atom(&self, name: &str) -> Option<&AtomDecl> {
        self.atoms.iter().find(|a| a.name == name)
    }

    pub fn var(&self, name: &str) -> Option<&Type> {
        self.vars.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s == name)
    }

    /// Adds declarations from `other` that are not yet present.
    pub fn merge(&mut self, other: &Signature) {
        for s in &other.sorts {
            if !self.has_sort(s) {
                self.sorts.push(s.clone());
            }
        }
        for a in &other.atoms {
            if self.atom(&a.name).is_none() {
                self.atoms.push(a.clone());
            }
        }
        for (n, t) in &other.vars {
            if self.var(n).is_none() {
                self.vars.push((n.clone(), t.clone()));
            }
        }
    }
}

/// A parsed file: preamble plus one formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub sig: Signature,
    pub formula: Formula,
}
