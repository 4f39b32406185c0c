//! Proof scripts: reading and printing.
//!
//! ```text
//! <preamble declarations>
//! (name continuity)
//! (mode P)
//! (oracles MU2 MU1)
//! (standard <declared parameter>*)
//! (premise L <formula> (witness <binder> single|list <closed term>)*)
//! (start <formula>)
//! (rewrite <rule> <path> <arg>*)
//! (axiom st-closed <name> <closed term>)
//! (axiom st-app <name> <f> <x>*)
//! (axiom ia-st <name> <base> <step>)
//! (axiom I|hac|ncr|hip|hgmp <path>)
//! (axiom qf-ac <formula>)
//! (axiom max <binder>)
//! (axiom st-lift <normal form>)
//! (mp <premise>)
//! (oracle MU2|MU1)
//! (supply <binder> <term>)
//! (conclusion <formula>)
//! ```

use std::fmt::Write;

use crate::rewrite::path::parse_path_sexp;
use crate::rewrite::{Mode, Path};
use crate::syntax::ast::*;
use crate::syntax::parse::{parse_formula_sexp, parse_term_sexp, split_preamble};
use crate::syntax::print::{print_formula, print_signature, print_term};
use crate::syntax::sexp::{read_all, Sexp};

use super::{ExtractError, Witness, XResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Oracle {
    Mu2,
    /// Feferman's second mu-operator; carried symbolically, never run.
    Mu1,
}

impl Oracle {
    pub fn name(self) -> &'static str {
        match self {
            Oracle::Mu2 => "MU2",
            Oracle::Mu1 => "MU1",
        }
    }

    fn parse(s: &str) -> Option<Oracle> {
        match s {
            "MU2" | "mu2" => Some(Oracle::Mu2),
            "MU1" | "mu1" | "MUO" => Some(Oracle::Mu1),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub name: String,
    pub formula: Formula,
    /// Closed witnesses for the existential binders of the premise's
    /// normal form (for an implication, of its combined normal form).
    pub witnesses: Vec<(String, Witness)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomInstance {
    /// `st(t)` for a closed term: stores `<t>`.
    StClosed {
        name: String,
        term: Term,
    },
    /// `st(f) & st(x) -> st(f x)`: stores the flattened pointwise application.
    StApp {
        name: String,
        fun: String,
        args: Vec<String>,
    },
    /// Induction over standard numbers: stores `lam n. Rec(base, step, n)`.
    IaSt {
        name: String,
        base: Term,
        step: Term,
    },
    /// Idealisation and the Herbrandized schemas, by rule name and position.
    Schema {
        rule: String,
        path: Path,
    },
    QfAc(Formula),
    /// Term-level maximum of a list witness for a `Nat` binder.
    Max(String),
    /// Lifts an internal sentence to the normal form it strips to.
    StLift(Formula),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptStep {
    Rewrite {
        rule: String,
        path: Path,
        args: Vec<String>,
    },
    Axiom(AxiomInstance),
    ModusPonens(String),
    OracleUse(Oracle),
    WitnessSupply {
        binder: String,
        term: Term,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofScript {
    pub name: String,
    pub mode: Mode,
    pub oracles: Vec<Oracle>,
    /// Declared parameters taken as standard closed functionals, which
    /// witnesses may mention.
    pub standard: Vec<String>,
    pub sig: Signature,
    pub premises: Vec<Premise>,
    /// The formula the steps start from; the fixture source when absent.
    pub start: Option<Formula>,
    pub steps: Vec<ScriptStep>,
    pub conclusion: Formula,
}

fn bad<T>(x: &Sexp, msg: &str) -> XResult<T> {
    Err(ExtractError::Script(format!("{}: {msg}: {x}", x.pos())))
}

fn ident(x: &Sexp) -> XResult<String> {
    match x.as_atom() {
        Some(s) => Ok(s.to_string()),
        None => bad(x, "expected a name"),
    }
}

fn formula(x: &Sexp, sig: &Signature) -> XResult<Formula> {
    parse_formula_sexp(x, sig).map_err(|e| ExtractError::Script(e.to_string()))
}

fn term(x: &Sexp, sig: &Signature) -> XResult<Term> {
    parse_term_sexp(x, sig).map_err(|e| ExtractError::Script(e.to_string()))
}

fn path(x: &Sexp) -> XResult<Path> {
    parse_path_sexp(x).ok_or_else(|| ExtractError::Script(format!("{}: bad path {x}", x.pos())))
}

const SCHEMAS: &[(&str, &str)] = &[
    ("I", "idealize"),
    ("idealize", "idealize"),
    ("hac", "hac"),
    ("HAC", "hac"),
    ("ncr", "ncr"),
    ("NCR", "ncr"),
    ("hip", "hip"),
    ("HIP", "hip"),
    ("hgmp", "hgmp"),
    ("HGMP", "hgmp"),
];

fn axiom(xs: &[Sexp], whole: &Sexp, sig: &Signature) -> XResult<AxiomInstance> {
    let Some(kind) = xs.get(1).and_then(Sexp::as_atom) else {
        return bad(whole, "axiom needs a name");
    };
    let n = xs.len();
    let a = match kind {
        "st-closed" if n == 4 => AxiomInstance::StClosed {
            name: ident(&xs[2])?,
            term: term(&xs[3], sig)?,
        },
        "st-app" if n >= 5 => AxiomInstance::StApp {
            name: ident(&xs[2])?,
            fun: ident(&xs[3])?,
            args: xs[4..].iter().map(ident).collect::<XResult<_>>()?,
        },
        "ia-st" if n == 5 => AxiomInstance::IaSt {
            name: ident(&xs[2])?,
            base: term(&xs[3], sig)?,
            step: term(&xs[4], sig)?,
        },
        "qf-ac" if n == 3 => AxiomInstance::QfAc(formula(&xs[2], sig)?),
        "max" if n == 3 => AxiomInstance::Max(ident(&xs[2])?),
        "st-lift" if n == 3 => AxiomInstance::StLift(formula(&xs[2], sig)?),
        k if n == 3 && SCHEMAS.iter().any(|(a, _)| *a == k) => AxiomInstance::Schema {
            rule: SCHEMAS.iter().find(|(a, _)| *a == k).unwrap().1.to_string(),
            path: path(&xs[2])?,
        },
        _ => return bad(whole, "unknown axiom or wrong number of arguments"),
    };
    Ok(a)
}

fn witness_form(x: &Sexp, sig: &Signature) -> XResult<(String, Witness)> {
    match x.as_list() {
        Some([h, b, k, t]) if h.as_atom() == Some("witness") => {
            let single = match k.as_atom() {
                Some("single") => true,
                Some("list") => false,
                _ => return bad(x, "witness kind must be single or list"),
            };
            Ok((
                ident(b)?,
                Witness {
                    term: term(t, sig)?,
                    single,
                },
            ))
        }
        _ => bad(x, "expected (witness <binder> single|list <term>)"),
    }
}

/// Reads a script. Declarations in the file extend `base`.
pub fn parse_script(text: &str, base: &Signature) -> XResult<ProofScript> {
    let forms = read_all(text).map_err(|e| ExtractError::Script(e.to_string()))?;
    let mut sig = base.clone();
    let rest = split_preamble(&forms, &mut sig).map_err(|e| ExtractError::Script(e.to_string()))?;
    let mut s = ProofScript {
        name: String::new(),
        mode: Mode::P,
        oracles: vec![],
        standard: vec![],
        sig: Signature::default(),
        premises: vec![],
        start: None,
        steps: vec![],
        conclusion: Formula::Eq0(Term::Zero, Term::Zero),
    };
    let mut conclusion = None;
    for x in &rest {
        let xs = x.as_list().unwrap_or(&[]);
        match x.head() {
            Some("name") if xs.len() == 2 => s.name = ident(&xs[1])?,
            Some("mode") if xs.len() == 2 => {
                s.mode = ident(&xs[1])?.parse().map_err(ExtractError::Script)?
            }
            Some("oracles") => {
                for o in &xs[1..] {
                    let n = ident(o)?;
                    let o = Oracle::parse(&n)
                        .ok_or_else(|| ExtractError::Script(format!("unknown oracle `{n}`")))?;
                    s.oracles.push(o);
                }
            }
            Some("standard") => {
                for v in &xs[1..] {
                    let n = ident(v)?;
                    if sig.var(&n).is_none() {
                        return bad(v, "standard names a parameter that is not declared");
                    }
                    s.standard.push(n);
                }
            }
            Some("premise") if xs.len() >= 3 => {
                let witnesses = xs[3..]
                    .iter()
                    .map(|w| witness_form(w, &sig))
                    .collect::<XResult<_>>()?;
                s.premises.push(Premise {
                    name: ident(&xs[1])?,
                    formula: formula(&xs[2], &sig)?,
                    witnesses,
                });
            }
            Some("start") if xs.len() == 2 => s.start = Some(formula(&xs[1], &sig)?),
            Some("conclusion") if xs.len() == 2 => conclusion = Some(formula(&xs[1], &sig)?),
            Some("rewrite") if xs.len() >= 3 => s.steps.push(ScriptStep::Rewrite {
                rule: ident(&xs[1])?,
                path: path(&xs[2])?,
                args: xs[3..].iter().map(ident).collect::<XResult<_>>()?,
            }),
            Some("axiom") => s.steps.push(ScriptStep::Axiom(axiom(xs, x, &sig)?)),
            Some("mp") if xs.len() == 2 => s.steps.push(ScriptStep::ModusPonens(ident(&xs[1])?)),
            Some("oracle") if xs.len() == 2 => {
                let n = ident(&xs[1])?;
                let o = Oracle::parse(&n)
                    .ok_or_else(|| ExtractError::Script(format!("unknown oracle `{n}`")))?;
                s.steps.push(ScriptStep::OracleUse(o));
            }
            Some("supply") if xs.len() == 3 => s.steps.push(ScriptStep::WitnessSupply {
                binder: ident(&xs[1])?,
                term: term(&xs[2], &sig)?,
            }),
            _ => return bad(x, "unknown script form"),
        }
    }
    s.conclusion =
        conclusion.ok_or_else(|| ExtractError::Script("script has no (conclusion ..)".into()))?;
    s.sig = sig;
    Ok(s)
}

fn path_text(p: &[usize]) -> String {
    let parts: Vec<String> = p.iter().map(|i| i.to_string()).collect();
    format!("({})", parts.join(" "))
}

fn witness_text(b: &str, w: &Witness) -> String {
    format!("(witness {b} {} {})", w.kind(), print_term(&w.term))
}

/// Prints a script that [`parse_script`] reads back.
pub fn print_script(s: &ProofScript) -> String {
    let mut out = print_signature(&s.sig);
    if !s.name.is_empty() {
        writeln!(out, "(name {})", s.name).unwrap();
    }
    writeln!(out, "(mode {})", s.mode).unwrap();
    if !s.oracles.is_empty() {
        let names: Vec<&str> = s.oracles.iter().map(|o| o.name()).collect();
        writeln!(out, "(oracles {})", names.join(" ")).unwrap();
    }
    if !s.standard.is_empty() {
        writeln!(out, "(standard {})", s.standard.join(" ")).unwrap();
    }
    for p in &s.premises {
        write!(out, "(premise {} {}", p.name, print_formula(&p.formula)).unwrap();
        for (b, w) in &p.witnesses {
            write!(out, " {}", witness_text(b, w)).unwrap();
        }
        out.push_str(")\n");
    }
    if let Some(f) = &s.start {
        writeln!(out, "(start {})", print_formula(f)).unwrap();
    }
    for st in &s.steps {
        let line = match st {
            ScriptStep::Rewrite { rule, path, args } => {
                let mut l = format!("(rewrite {rule} {}", path_text(path));
                for a in args {
                    write!(l, " {a}").unwrap();
                }
                l.push(')');
                l
            }
            ScriptStep::Axiom(a) => match a {
                AxiomInstance::StClosed { name, term } => {
                    format!("(axiom st-closed {name} {})", print_term(term))
                }
                AxiomInstance::StApp { name, fun, args } => {
                    format!("(axiom st-app {name} {fun} {})", args.join(" "))
                }
                AxiomInstance::IaSt { name, base, step } => format!(
                    "(axiom ia-st {name} {} {})",
                    print_term(base),
                    print_term(step)
                ),
                AxiomInstance::Schema { rule, path } => {
                    format!("(axiom {rule} {})", path_text(path))
                }
                AxiomInstance::QfAc(f) => format!("(axiom qf-ac {})", print_formula(f)),
                AxiomInstance::Max(b) => format!("(axiom max {b})"),
                AxiomInstance::StLift(f) => format!("(axiom st-lift {})", print_formula(f)),
            },
            ScriptStep::ModusPonens(l) => format!("(mp {l})"),
            ScriptStep::OracleUse(o) => format!("(oracle {})", o.name()),
            ScriptStep::WitnessSupply { binder, term } => {
                format!("(supply {binder} {})", print_term(term))
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    writeln!(out, "(conclusion {})", print_formula(&s.conclusion)).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_print_roundtrip() {
        let text = "(declare-atom phi (Nat Nat) :decidable :monotone 1)\n(name demo)\n(mode H)\n(oracles MU2)\n(premise L (forall-st (x Nat) (exists-st (y Nat) (atom phi x y))) (witness y single (lam (x Nat) x)))\n(start (forall-st (x Nat) (exists-st (y Nat) (atom phi x y))))\n(rewrite prenex () local)\n(axiom st-closed c (lam (k Nat) (succ k)))\n(axiom st-app d c x)\n(axiom ia-st e (nil Nat) (lam (n Nat) (lam (l (Seq Nat)) l)))\n(axiom idealize (0 1))\n(axiom qf-ac (forall (x Nat) (exists (y Nat) (le0 x y))))\n(axiom max y)\n(mp L)\n(oracle MU2)\n(supply y d)\n(conclusion (forall-st (x Nat) (exists-st (y Nat) (atom phi x y))))\n";
        let s = parse_script(text, &Signature::default()).unwrap();
        assert_eq!(s.mode, Mode::H);
        assert_eq!(s.steps.len(), 10);
        assert_eq!(print_script(&s), text);
    }

    #[test]
    fn missing_conclusion_and_unknown_form() {
        assert!(parse_script("(name x)", &Signature::default()).is_err());
        assert!(parse_script(
            "(frobnicate)\n(conclusion (eq0 0 0))",
            &Signature::default()
        )
        .is_err());
        assert!(parse_script(
            "(axiom bogus 1)\n(conclusion (eq0 0 0))",
            &Signature::default()
        )
        .is_err());
    }
}
