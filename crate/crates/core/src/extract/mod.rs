//! Term extraction from step-annotated proof scripts.
//!
//! A script walks a formula to a normal form. Along the way every standard
//! existential binder in the prefix may carry a witness: a term over the
//! standard universals before it, either a single value or a finite list of
//! candidates. Rewrite steps transform the witnesses; axiom steps build them.

pub mod oracle;
pub mod reverse;
pub mod run;
pub mod script;
pub mod terms;

use std::collections::HashSet;
use std::fmt;

use crate::rewrite::{exists_in, NormalForm, RewriteError, RewriteTrace};
use crate::syntax::alpha::{all_names, all_names_term, free_vars_term, fresh, substitute};
use crate::syntax::ast::*;
use crate::syntax::print::{print_formula, print_term};

pub use oracle::{bounded_mu, instantiate_oracle, mu_spec, muo_spec, MU1_VAR, MU_VAR};
pub use reverse::reverse_direction;
pub use run::{realizer_for_axiom, run_script};
pub use script::{
    parse_script, print_script, AxiomInstance, Oracle, Premise, ProofScript, ScriptStep,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("step {index} inapplicable: {detail}")]
    StepInapplicable { index: usize, detail: String },
    #[error("no witness for binder `{0}`")]
    MissingWitness(String),
    #[error("oracle {0} used but not declared by the script")]
    OracleNotDeclared(String),
    #[error("ill-typed instantiation: {0}")]
    IllTypedInstantiation(String),
    #[error("witness for `{0}` is not closed")]
    OpenWitness(String),
    #[error("result depends on oracle parameters; instantiate them first")]
    OracleBlocked,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("final formula {got} is not the conclusion {want}")]
    ConclusionMismatch { got: String, want: String },
    #[error("script: {0}")]
    Script(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

pub type XResult<T> = Result<T, ExtractError>;

/// A witness for one existential binder.
///
/// `single` witnesses have the binder's type; list witnesses have type
/// `Seq` of it and mean "some element works".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub term: Term,
    pub single: bool,
}

impl Witness {
    pub fn single(term: Term) -> Witness {
        Witness { term, single: true }
    }

    pub fn list(term: Term) -> Witness {
        Witness {
            term,
            single: false,
        }
    }

    /// The witness as a list of candidates.
    pub fn as_list(&self, elem: &Type) -> Term {
        if self.single {
            Term::singleton(self.term.clone(), elem.clone())
        } else {
            self.term.clone()
        }
    }

    pub fn kind(&self) -> &'static str {
        if self.single {
            "single"
        } else {
            "list"
        }
    }
}

/// A closed witness: `lam U.. body` over the universal block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedWitness {
    pub binder: String,
    pub ty: Type,
    pub witness: Witness,
}

impl fmt::Display for ExtractedWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(witness {} {} {})",
            self.binder,
            self.witness.kind(),
            print_term(&self.witness.term)
        )
    }
}

/// An assumed oracle: its variable, type and specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleParameter {
    pub name: String,
    pub ty: Type,
    pub spec: Formula,
}

#[derive(Clone, Debug)]
pub struct ExtractionResult {
    pub name: String,
    pub sig: Signature,
    pub nf: NormalForm,
    /// One entry per existential binder of `nf`, in block order.
    pub witnesses: Vec<ExtractedWitness>,
    pub internal_sentence: Formula,
    pub oracle_parameters: Vec<OracleParameter>,
    pub provenance: RewriteTrace,
    pub notes: Vec<String>,
    /// Set once an oracle has been replaced by an approximation.
    pub oracle_approximated: bool,
    /// The implementation substituted for the oracle, if any.
    pub oracle_impl: Option<Term>,
}

impl ExtractionResult {
    pub fn witness(&self, binder: &str) -> Option<&ExtractedWitness> {
        self.witnesses.iter().find(|w| w.binder == binder)
    }

    /// The witness file: one `(witness <binder> single|list <term>)` per line.
    pub fn witnesses_text(&self) -> String {
        self.witnesses.iter().map(|w| format!("{w}\n")).collect()
    }

    /// Witnesses as `(binder, closed term)` pairs, for [`strip_st`].
    pub fn witness_map(&self) -> Vec<(String, Witness)> {
        self.witnesses
            .iter()
            .map(|w| (w.binder.clone(), w.witness.clone()))
            .collect()
    }
}

/// Parses a witness file produced by [`ExtractionResult::witnesses_text`].
pub fn parse_witnesses(text: &str, sig: &Signature) -> XResult<Vec<(String, Witness)>> {
    let forms =
        crate::syntax::sexp::read_all(text).map_err(|e| ExtractError::Script(e.to_string()))?;
    let mut out = Vec::new();
    for x in &forms {
        let items = x.as_list().unwrap_or(&[]);
        let ok = x.head() == Some("witness") && items.len() == 4;
        if !ok {
            return Err(ExtractError::Script(format!(
                "expected (witness <binder> single|list <term>), found {x}"
            )));
        }
        let binder = items[1].as_atom().unwrap_or_default().to_string();
        let single = match items[2].as_atom() {
            Some("single") => true,
            Some("list") => false,
            _ => return Err(ExtractError::Script(format!("bad witness kind in {x}"))),
        };
        let term = crate::syntax::parse::parse_term_sexp(&items[3], sig)
            .map_err(|e| ExtractError::Script(e.to_string()))?;
        out.push((binder, Witness { term, single }));
    }
    Ok(out)
}

/// Replaces the standard blocks of a normal form by the witnesses:
/// `(forall-st U)(exists-st y) phi` becomes `(forall U) phi[y := s U]` for a
/// single witness `s` and `(forall U)(exists i < |t U|) phi[y := t U i]` for
/// a list witness `t`. Witnesses are closed terms `lam U.. body`.
pub fn strip_st(nf: &NormalForm, witnesses: &[(String, Witness)]) -> XResult<Formula> {
    let univ: Vec<String> = nf.univ.iter().map(|(u, _)| u.clone()).collect();
    let mut open = Vec::new();
    for (y, _) in &nf.exist {
        let w = witnesses
            .iter()
            .find(|(b, _)| b == y)
            .map(|(_, w)| w)
            .ok_or_else(|| ExtractError::MissingWitness(y.clone()))?;
        open.push(Witness {
            term: terms::apply_vars(&w.term, &univ),
            single: w.single,
        });
    }
    let mut used: HashSet<String> = all_names(&nf.to_formula());
    for w in &open {
        used.extend(all_names_term(&w.term));
    }
    let mut body = nf.matrix.clone();
    for ((y, _), w) in nf.exist.iter().zip(&open).rev() {
        if w.single {
            body = substitute(&body, y, &w.term);
        } else {
            let i = fresh("i", &used);
            used.insert(i.clone());
            let inner = substitute(&body, y, &Term::idx(w.term.clone(), Term::var(&i)));
            body = exists_in(&i, w.term.clone(), inner);
        }
    }
    let prefix: Vec<(Quant, String, Type)> = nf
        .univ
        .iter()
        .map(|(u, t)| (Quant::Forall, u.clone(), t.clone()))
        .collect();
    Ok(Formula::with_prefix(&prefix, body))
}

/// Closes an open witness over the universal block.
pub fn close_witness(w: &Witness, univ: &[(String, Type)]) -> Witness {
    Witness {
        term: Term::lams(univ, w.term.clone()),
        single: w.single,
    }
}

/// True when the witness mentions nothing but its own lambdas.
pub fn is_closed(t: &Term) -> bool {
    free_vars_term(t).is_empty()
}

pub(crate) fn show(f: &Formula) -> String {
    print_formula(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::{parse_document, parse_term};

    #[test]
    fn strip_single_and_list() {
        let d = parse_document(
            "(declare-atom phi (Nat Nat))\n(forall-st (x Nat) (exists-st (y Nat) (atom phi x y)))",
        )
        .unwrap();
        let nf = NormalForm::from_formula(&d.formula).unwrap();
        let s = parse_term("(lam (x Nat) (succ x))", &d.sig).unwrap();
        let f = strip_st(&nf, &[("y".into(), Witness::single(s))]).unwrap();
        assert_eq!(show(&f), "(forall (x Nat) (atom phi x (succ x)))");
        let t = parse_term("(lam (x Nat) (cons x (cons 0 (nil Nat))))", &d.sig).unwrap();
        let f = strip_st(&nf, &[("y".into(), Witness::list(t))]).unwrap();
        assert_eq!(
            show(&f),
            "(forall (x Nat) (exists (i Nat) (and (le0 (succ i) (len (cons x (cons 0 (nil Nat))))) (atom phi x (idx (cons x (cons 0 (nil Nat))) i)))))"
        );
        assert!(f.is_internal());
    }

    #[test]
    fn strip_empty_blocks_and_missing() {
        let d = parse_document("(declare-atom p (Nat))\n(forall (x Nat) (atom p x))").unwrap();
        let nf = NormalForm::internal(d.formula.clone());
        assert_eq!(strip_st(&nf, &[]).unwrap(), d.formula);
        let d = parse_document("(declare-atom p (Nat))\n(exists-st (x Nat) (atom p x))").unwrap();
        let nf = NormalForm::from_formula(&d.formula).unwrap();
        assert_eq!(
            strip_st(&nf, &[]),
            Err(ExtractError::MissingWitness("x".into()))
        );
    }

    #[test]
    fn witness_file_roundtrip() {
        let sig = Signature::default();
        let w = ExtractedWitness {
            binder: "n".into(),
            ty: Type::Nat,
            witness: Witness::single(parse_term("(lam (k Nat) (succ k))", &sig).unwrap()),
        };
        let text = format!("{w}\n");
        let back = parse_witnesses(&text, &sig).unwrap();
        assert_eq!(back, vec![("n".to_string(), w.witness.clone())]);
    }
}
