//! Independent finite checks: extracted witnesses against interpretations,
//! and axiom schemas against cutoff semantics.

pub mod check;
pub mod cutoff;
pub mod interp;
pub mod rational;

use std::fmt;

use crate::eval::EvalError;

pub use check::{brute_force_modulus, check_witness, decrement_witness, mu_grid_check, MuReport};
pub use cutoff::{cutoff_check, schema, schemas, CutoffOptions, Schema};
pub use interp::Interpretation;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("interpretation: {0}")]
    Interp(String),
    #[error("no carrier for type {0}")]
    NoCarrier(String),
    #[error("atom `{0}` has no decidable interpretation")]
    UndecidableAtom(String),
    #[error("parameter `{0}` has no interpretation")]
    Unbound(String),
    #[error("not internal: {0}")]
    NotInternal(String),
    #[error("rule evaluation: {0}")]
    Rule(String),
    #[error("no modulus up to {0} on the grid")]
    NoModulus(u64),
    #[error("{0}")]
    Shape(String),
    #[error("size budget exceeded: {0}")]
    SizeBudgetExceeded(String),
    #[error("unknown schema `{0}`")]
    UnknownSchema(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Failure {
    pub assignment: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub instances: u128,
    /// Number of failing instances; `failures` keeps the first few.
    pub failed: u128,
    pub failures: Vec<Failure>,
    /// Evaluator reductions (witness checks) or table branches (cutoff).
    pub steps: u64,
    /// Set when some size was sampled instead of enumerated.
    pub sampled: bool,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict}: {} instances, {} failed",
            self.instances, self.failed
        )?;
        if self.sampled {
            write!(f, " (sampled)")?;
        }
        for x in &self.failures {
            write!(f, "\n  counterexample {}: {}", x.assignment, x.detail)?;
        }
        Ok(())
    }
}
