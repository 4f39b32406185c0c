//! Rewrite traces and their replay.

use crate::syntax::ast::Formula;
use crate::syntax::print::print_formula;

use super::path::PathDisplay;
use super::{collapse, driver, prenex, rules, unfold, Engine, Path, RResult, RewriteError};

/// Every rule name understood by [`apply_rule`].
pub const RULES: &[&str] = &[
    "unfold",
    "omega-bound",
    "prenex",
    "idealize",
    "hac",
    "ncr",
    "hgmp",
    "hip",
    "overspill",
    "max-collapse",
    "nf-implication",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: String,
    pub path: Path,
    /// Extra rule arguments, e.g. `local` for prenexing a subformula on its own.
    pub args: Vec<String>,
    /// Free-text justification (the monotonicity facts behind a collapse).
    pub note: Vec<String>,
    pub before: Formula,
    pub after: Formula,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteTrace {
    pub steps: Vec<TraceStep>,
}

impl RewriteTrace {
    pub fn new() -> RewriteTrace {
        RewriteTrace::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(
        &mut self,
        rule: &str,
        path: &[usize],
        args: Vec<String>,
        before: Formula,
        after: Formula,
    ) {
        self.steps.push(TraceStep {
            rule: rule.into(),
            path: path.to_vec(),
            args,
            note: vec![],
            before,
            after,
        });
    }

    pub fn rules(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.rule.as_str()).collect()
    }

    /// `step <n>: <rule> @ <path>` followed by the formula after the step.
    /// Step 0 records the input.
    pub fn to_text(&self, input: &Formula) -> String {
        let mut out = format!("step 0: input @ root\n{}\n", print_formula(input));
        for (n, s) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "step {}: {} @ {}\n",
                n + 1,
                s.rule,
                PathDisplay(s.path.clone())
            ));
            if !s.args.is_empty() {
                out.push_str(&format!("; args: {}\n", s.args.join(" ")));
            }
            for j in &s.note {
                out.push_str(&format!("; {j}\n"));
            }
            out.push_str(&print_formula(&s.after));
            out.push('\n');
        }
        out
    }
}

/// Applies one named rule at `path`.
pub fn apply_rule(
    e: &Engine,
    f: &Formula,
    rule: &str,
    path: &[usize],
    args: &[String],
) -> RResult<Formula> {
    match rule {
        "unfold" => unfold::unfold_at(e, f, path),
        "omega-bound" => unfold::omega_bound_at(e, f, path),
        "prenex" => {
            if args.iter().any(|a| a == "local") {
                prenex::prenex_local_at(e, f, path)
            } else {
                prenex::prenex_at(e, f, path)
            }
        }
        "idealize" => rules::idealize_at(e, f, path),
        "hac" => rules::hac_at(e, f, path),
        "ncr" => rules::ncr_at(e, f, path),
        "hgmp" => rules::hgmp_at(e, f, path),
        "hip" => rules::hip_at(e, f, path),
        "overspill" => rules::overspill_at(e, f, path),
        "max-collapse" => collapse::max_collapse_at(e, f, path).map(|c| c.formula),
        "nf-implication" => driver::nf_implication_at(f, path, &e.sig),
        other => Err(RewriteError::UnknownRule(other.into())),
    }
}

/// Re-applies every step from the first snapshot and checks each result.
/// Returns the final formula.
pub fn replay(e: &Engine, trace: &RewriteTrace) -> RResult<Option<Formula>> {
    let Some(first) = trace.steps.first() else {
        return Ok(None);
    };
    let mut cur = first.before.clone();
    for (n, s) in trace.steps.iter().enumerate() {
        if cur != s.before {
            return Err(RewriteError::ReplayMismatch {
                step: n + 1,
                detail: "snapshot does not continue the previous step".into(),
            });
        }
        let next = apply_rule(e, &cur, &s.rule, &s.path, &s.args)?;
        if next != s.after {
            return Err(RewriteError::ReplayMismatch {
                step: n + 1,
                detail: format!(
                    "{} @ {} produced {}",
                    s.rule,
                    PathDisplay(s.path.clone()),
                    print_formula(&next)
                ),
            });
        }
        cur = next;
    }
    Ok(Some(cur))
}
