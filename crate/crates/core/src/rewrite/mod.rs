//! The quantifier calculus: unfolding, st-prenexing, Idealisation, choice,
//! the H-mode schemas, max-collapse and the normal-form closure results.

pub mod collapse;
pub mod driver;
pub mod nf;
pub mod path;
pub mod prenex;
pub mod rules;
pub mod trace;
pub mod unfold;

use std::collections::HashSet;
use std::fmt;

use crate::syntax::alpha::{all_names, NameSupply};
use crate::syntax::ast::*;

pub use driver::{nf_forall_infinitesimal, nf_implication, normalize_to_normal_form};
pub use nf::NormalForm;
pub use path::{Path, PathDisplay};
pub use trace::{replay, RewriteTrace, TraceStep};

/// P is classical, H is intuitionistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    P,
    H,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::P => "P",
            Mode::H => "H",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "P" | "p" => Ok(Mode::P),
            "H" | "h" => Ok(Mode::H),
            _ => Err(format!("unknown mode `{s}` (expected P or H)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("{rule}: pattern mismatch at {path}: {detail}")]
    PatternMismatch {
        rule: String,
        path: PathDisplay,
        detail: String,
    },
    #[error("{rule}: matrix at {path} is not internal")]
    NonInternalMatrix { rule: String, path: PathDisplay },
    #[error("max-collapse of `{binder}` not licensed: {detail}")]
    NotMonotone { binder: String, detail: String },
    #[error("missing atom declaration `{0}`")]
    MissingAtomDecl(String),
    #[error("{rule} needs a classical step that mode {mode} refuses")]
    WrongMode { rule: String, mode: Mode },
    #[error("st-quantifier under an internal quantifier cannot be extracted at {0}")]
    NonPrenexable(PathDisplay),
    #[error("not in the supported fragment: blocking node at {path}: {node}")]
    NotInFragment { path: PathDisplay, node: String },
    #[error("no subformula at path {0}")]
    BadPath(PathDisplay),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("trace replay diverged at step {step}: {detail}")]
    ReplayMismatch { step: usize, detail: String },
}

pub type RResult<T> = Result<T, RewriteError>;

pub(crate) fn mismatch<T>(rule: &str, path: &[usize], detail: impl Into<String>) -> RResult<T> {
    Err(RewriteError::PatternMismatch {
        rule: rule.to_string(),
        path: PathDisplay(path.to_vec()),
        detail: detail.into(),
    })
}

/// Rule engine: a signature plus the global P/H flag.
#[derive(Clone, Debug)]
pub struct Engine {
    pub sig: Signature,
    pub mode: Mode,
}

impl Engine {
    pub fn new(sig: Signature, mode: Mode) -> Engine {
        Engine { sig, mode }
    }

    /// Fresh names avoid every name in `f` and every declared parameter.
    pub fn names(&self, f: &Formula) -> NameSupply {
        let mut used: HashSet<String> = all_names(f);
        used.extend(self.sig.vars.iter().map(|(n, _)| n.clone()));
        NameSupply::new(used)
    }
}

/// `(exists (i Nat) (and (le0 (succ i) (len l)) body))`, the internal
/// reading of `(exists z in l) body` with `z` replaced by `(idx l i)`.
pub fn exists_in(i: &str, list: Term, body: Formula) -> Formula {
    Formula::Exists(
        i.to_string(),
        Type::Nat,
        Box::new(Formula::and(bound_guard(i, list), body)),
    )
}

/// `(forall (i Nat) (imp (le0 (succ i) (len l)) body))`.
pub fn forall_in(i: &str, list: Term, body: Formula) -> Formula {
    Formula::Forall(
        i.to_string(),
        Type::Nat,
        Box::new(Formula::imp(bound_guard(i, list), body)),
    )
}

fn bound_guard(i: &str, list: Term) -> Formula {
    Formula::Le0(Term::succ(Term::var(i)), Term::len(list))
}

/// Recognizes [`exists_in`], returning `(i, list, body)`.
pub fn match_exists_in(f: &Formula) -> Option<(&str, &Term, &Formula)> {
    if let Formula::Exists(i, Type::Nat, b) = f {
        if let Formula::And(g, body) = &**b {
            if let Some(list) = match_guard(i, g) {
                return Some((i, list, body));
            }
        }
    }
    None
}

/// Recognizes [`forall_in`], returning `(i, list, body)`.
pub fn match_forall_in(f: &Formula) -> Option<(&str, &Term, &Formula)> {
    if let Formula::Forall(i, Type::Nat, b) = f {
        if let Formula::Imp(g, body) = &**b {
            if let Some(list) = match_guard(i, g) {
                return Some((i, list, body));
            }
        }
    }
    None
}

fn match_guard<'a>(i: &str, g: &'a Formula) -> Option<&'a Term> {
    if let Formula::Le0(Term::Succ(v), Term::Len(list)) = g {
        if **v == Term::var(i) {
            return Some(list);
        }
    }
    None
}

/// Name for the list binder standing for `x`: `xs`.
pub(crate) fn list_name(x: &str, names: &mut NameSupply) -> String {
    names.fresh(&format!("{x}s"))
}

/// Element name recovered from a list binder name.
pub(crate) fn element_name(list: &str, names: &mut NameSupply) -> String {
    let base = list
        .trim_end_matches(|c: char| c.is_ascii_digit())
        .strip_suffix('s')
        .filter(|b| !b.is_empty())
        .unwrap_or(list);
    names.fresh(base)
}
