//! From an internal sentence with closed witnesses back to a script that
//! reaches the normal form.

use crate::rewrite::Mode;

use super::script::{AxiomInstance, ProofScript, ScriptStep};
use super::{is_closed, ExtractError, ExtractionResult, XResult};

/// A script deriving `r.nf` from `r.internal_sentence` in mode H: each
/// closed witness is standard, and the normal form is lifted from the
/// sentence it strips to.
pub fn reverse_direction(r: &ExtractionResult) -> XResult<ProofScript> {
    if !r.oracle_parameters.is_empty() {
        return Err(ExtractError::OracleBlocked);
    }
    let mut steps = Vec::new();
    for w in &r.witnesses {
        if !is_closed(&w.witness.term) {
            return Err(ExtractError::OpenWitness(w.binder.clone()));
        }
        steps.push(ScriptStep::Axiom(AxiomInstance::StClosed {
            name: w.binder.clone(),
            term: w.witness.term.clone(),
        }));
    }
    let conclusion = r.nf.to_formula();
    if !r.witnesses.is_empty() || !r.nf.univ.is_empty() {
        steps.push(ScriptStep::Axiom(AxiomInstance::StLift(conclusion.clone())));
    }
    Ok(ProofScript {
        name: format!("{}-reverse", r.name),
        mode: Mode::H,
        oracles: vec![],
        standard: vec![],
        sig: r.sig.clone(),
        premises: vec![],
        start: Some(r.internal_sentence.clone()),
        steps,
        conclusion,
    })
}
