//! The fixture corpus: loading, running every pipeline stage against the
//! frozen expectations, and blessing new ones.
//!
//! A fixture is a directory holding `source.nsa`, a `meta` file and
//! optionally `script.nss` (an extraction script) and `interp.int` (a finite
//! interpretation). Frozen outputs live next to them as `expected.*`.

use std::fmt;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::extract::{
    bounded_mu, instantiate_oracle, parse_script, reverse_direction, run_script, strip_st,
    ExtractionResult, Witness, MU1_VAR, MU_VAR,
};
use crate::rewrite::path::parse_path_sexp;
use crate::rewrite::trace::apply_rule;
use crate::rewrite::{normalize_to_normal_form, Engine, Mode, NormalForm, Path};
use crate::syntax::alpha_eq;
use crate::syntax::ast::{Document, Term, Type};
use crate::syntax::parse::{parse_document, parse_formula};
use crate::syntax::print::print_formula;
use crate::syntax::sexp::read_all;
use crate::verify::{
    check_witness, decrement_witness, mu_grid_check, Interpretation, VerificationReport,
};

pub const ORACLE_GRID_CHECKED: &str = "oracle-approximated, MU grid-checked only";
pub const ORACLE_VIOLATED: &str = "oracle-approximated, specification violated on grid";
pub const ORACLE_SYMBOLIC: &str = "symbolic-only: MU1 carried as a parameter, not evaluated";

pub const ENV_CORPUS_DIR: &str = "NSA_CORPUS_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("fixture `{fixture}`: {msg}")]
    Bad { fixture: String, msg: String },
}

/// The corpus directory: `$NSA_CORPUS_DIR`, else the one shipped with the crate.
pub fn default_root() -> PathBuf {
    match std::env::var_os(ENV_CORPUS_DIR) {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: String,
    pub path: Path,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Meta {
    pub anchor: String,
    pub mode: Mode,
    pub tags: Vec<String>,
    /// Bound of the default `bounded_mu` implementation for MU2.
    pub oracle_bound: Option<u64>,
    /// Single rule applications frozen in `expected.apply`.
    pub apply: Vec<RuleApplication>,
}

impl Meta {
    /// `key value` lines; `;` starts a comment.
    pub fn parse(text: &str) -> Result<Meta, String> {
        let mut m = Meta {
            anchor: String::new(),
            mode: Mode::P,
            tags: vec![],
            oracle_bound: None,
            apply: vec![],
        };
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split(';').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "anchor" => m.anchor = rest.to_string(),
                "mode" => m.mode = rest.parse()?,
                "tags" => m.tags.extend(rest.split_whitespace().map(String::from)),
                "oracle" => m.oracle_bound = Some(parse_oracle_spec(rest)?),
                "apply" => {
                    let (rule, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    let rest = rest.trim();
                    let close = rest
                        .find(')')
                        .ok_or_else(|| format!("line {}: apply needs a path", n + 1))?;
                    let path = read_all(&rest[..=close])
                        .ok()
                        .and_then(|xs| xs.first().and_then(parse_path_sexp))
                        .ok_or_else(|| format!("line {}: bad path `{}`", n + 1, &rest[..=close]))?;
                    m.apply.push(RuleApplication {
                        rule: rule.to_string(),
                        path,
                        args: rest[close + 1..]
                            .split_whitespace()
                            .map(String::from)
                            .collect(),
                    });
                }
                other => return Err(format!("line {}: unknown key `{other}`", n + 1)),
            }
        }
        Ok(m)
    }

    pub fn has_tag(&self, t: &str) -> bool {
        self.tags.iter().any(|x| x == t)
    }
}

/// Reads `mu=bounded:M`.
pub fn parse_oracle_spec(s: &str) -> Result<u64, String> {
    s.trim()
        .strip_prefix("mu=bounded:")
        .and_then(|m| m.parse().ok())
        .ok_or_else(|| {
            format!("oracle implementation `{s}` not understood (expected mu=bounded:M)")
        })
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub dir: PathBuf,
    pub meta: Meta,
    pub source: Document,
    pub script: Option<String>,
    pub interp: Option<String>,
}

fn read(path: &FsPath) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn read_opt(path: &FsPath) -> Result<Option<String>, CorpusError> {
    if path.exists() {
        read(path).map(Some)
    } else {
        Ok(None)
    }
}

impl Fixture {
    pub fn load(dir: &FsPath) -> Result<Fixture, CorpusError> {
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let bad = |msg: String| CorpusError::Bad {
            fixture: name.clone(),
            msg,
        };
        let source = parse_document(&read(&dir.join("source.nsa"))?)
            .map_err(|e| bad(format!("source.nsa: {e}")))?;
        let meta = Meta::parse(&read(&dir.join("meta"))?).map_err(|e| bad(format!("meta: {e}")))?;
        Ok(Fixture {
            name: name.clone(),
            dir: dir.to_path_buf(),
            meta,
            source,
            script: read_opt(&dir.join("script.nss"))?,
            interp: read_opt(&dir.join("interp.int"))?,
        })
    }

    pub fn expected(&self, file: &str) -> Option<String> {
        fs::read_to_string(self.dir.join(file)).ok()
    }

    pub fn engine(&self) -> Engine {
        Engine::new(self.source.sig.clone(), self.meta.mode)
    }

    pub fn normal_form(&self) -> Result<NormalForm, String> {
        normalize_to_normal_form(&self.engine(), &self.source.formula)
            .map(|(nf, _)| nf)
            .map_err(|e| e.to_string())
    }

    /// Runs the extraction script, starting from the source when it names no start.
    pub fn extract(&self) -> Result<Option<ExtractionResult>, String> {
        let Some(text) = &self.script else {
            return Ok(None);
        };
        let mut s = parse_script(text, &self.source.sig).map_err(|e| e.to_string())?;
        if s.start.is_none() {
            s.start = Some(self.source.formula.clone());
        }
        run_script(&s).map(Some).map_err(|e| e.to_string())
    }

    pub fn interpretation(
        &self,
        sig: &crate::syntax::ast::Signature,
    ) -> Result<Option<Interpretation>, String> {
        match &self.interp {
            None => Ok(None),
            Some(t) => Interpretation::parse(t, sig)
                .map(Some)
                .map_err(|e| e.to_string()),
        }
    }
}

/// Every fixture under `root`, sorted by name.
pub fn load(root: &FsPath) -> Result<Vec<Fixture>, CorpusError> {
    let entries = fs::read_dir(root).map_err(|e| CorpusError::Io {
        path: root.display().to_string(),
        msg: e.to_string(),
    })?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs.iter().map(|d| Fixture::load(d)).collect()
}

/// Fixtures matching any selector (a fixture name or a tag); no selectors
/// selects everything. Also returns the selectors that matched nothing.
pub fn select<'a>(all: &'a [Fixture], selectors: &[String]) -> (Vec<&'a Fixture>, Vec<String>) {
    if selectors.is_empty() {
        return (all.iter().collect(), vec![]);
    }
    let hit = |f: &Fixture, s: &str| f.name == s || f.meta.has_tag(s);
    let chosen = all
        .iter()
        .filter(|f| selectors.iter().any(|s| hit(f, s)))
        .collect();
    let unknown = selectors
        .iter()
        .filter(|s| !all.iter().any(|f| hit(f, s)))
        .cloned()
        .collect();
    (chosen, unknown)
}

pub fn list_table(fixtures: &[&Fixture]) -> String {
    let rows: Vec<[String; 4]> = fixtures
        .iter()
        .map(|f| {
            let tags = if f.meta.tags.is_empty() {
                "-".to_string()
            } else {
                f.meta.tags.join(",")
            };
            [
                f.name.clone(),
                f.meta.mode.to_string(),
                tags,
                f.meta.anchor.clone(),
            ]
        })
        .collect();
    let head = ["fixture", "mode", "tags", "anchor"].map(String::from);
    let mut w = [0usize; 4];
    for r in std::iter::once(&head).chain(&rows) {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.len());
        }
    }
    let line = |r: &[String; 4]| {
        format!(
            "{:<a$}  {:<b$}  {:<c$}  {}\n",
            r[0],
            r[1],
            r[2],
            r[3],
            a = w[0],
            b = w[1],
            c = w[2]
        )
        .trim_end()
        .to_string()
            + "\n"
    };
    std::iter::once(&head).chain(&rows).map(line).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
    /// Informational, e.g. an expectation was (re)written by `--bless`.
    Note,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
            Status::Note => "note",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct FixtureReport {
    pub name: String,
    pub stages: Vec<Stage>,
    pub oracle_status: Option<String>,
    /// The extraction result, after oracle instantiation.
    pub extraction: Option<ExtractionResult>,
    pub check: Option<VerificationReport>,
    pub mutation: Option<VerificationReport>,
}

impl FixtureReport {
    pub fn regression(&self) -> bool {
        self.stages.iter().any(|s| s.status == Status::Fail)
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    fn push(&mut self, name: &'static str, status: Status, detail: impl Into<String>) {
        self.stages.push(Stage {
            name,
            status,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.regression() { "FAIL" } else { "PASS" };
        writeln!(f, "{}: {verdict}", self.name)?;
        if let Some(o) = &self.oracle_status {
            writeln!(f, "  status: {o}")?;
        }
        for s in &self.stages {
            let mut lines = s.detail.lines();
            writeln!(
                f,
                "  {:<9} {:<4} {}",
                s.name,
                s.status,
                lines.next().unwrap_or("")
            )?;
            for l in lines {
                writeln!(f, "  {:<9} {:<4} {l}", "", "")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub bless: bool,
    pub jobs: usize,
    /// Overrides the fixture's `oracle mu=bounded:M`.
    pub mu_bound: Option<u64>,
    /// Extra functions for the MU grid check.
    pub extra_mu_grid: Vec<Term>,
}

/// Compares `actual` against `expected.<file>`, or writes it when blessing.
fn frozen(
    f: &Fixture,
    rep: &mut FixtureReport,
    stage: &'static str,
    file: &str,
    actual: &str,
    opts: &RunOptions,
    same: &dyn Fn(&str, &str) -> bool,
) {
    let path = f.dir.join(file);
    let old = f.expected(file);
    if opts.bless {
        if old.as_deref() == Some(actual) {
            rep.push(stage, Status::Pass, format!("{file} unchanged"));
            return;
        }
        match fs::write(&path, actual) {
            Ok(()) => rep.push(stage, Status::Note, format!("{file} blessed")),
            Err(e) => rep.push(stage, Status::Fail, format!("cannot write {file}: {e}")),
        }
        return;
    }
    match old {
        None => rep.push(
            stage,
            Status::Fail,
            format!("{file} missing (run with --bless)"),
        ),
        Some(old) if same(&old, actual) => rep.push(stage, Status::Pass, format!("matches {file}")),
        Some(old) => rep.push(
            stage,
            Status::Fail,
            format!(
                "differs from {file}\nexpected: {}\nactual:   {}",
                old.trim(),
                actual.trim()
            ),
        ),
    }
}

fn exact(a: &str, b: &str) -> bool {
    a.trim() == b.trim()
}

/// Each `Nat` witness decremented; the others unchanged.
pub fn decrement_all(r: &ExtractionResult) -> Vec<(String, Witness)> {
    r.witnesses
        .iter()
        .map(|w| {
            let mut x = w.witness.clone();
            if w.ty == Type::Nat {
                x.term = decrement_witness(&x.term, x.single);
            }
            (w.binder.clone(), x)
        })
        .collect()
}

fn verify_text(check: &VerificationReport, mutation: Option<&VerificationReport>) -> String {
    let mut s = format!("check {check}\n");
    if let Some(m) = mutation {
        s += &format!("mutation {m}\n");
    }
    s
}

pub fn run_fixture(f: &Fixture, opts: &RunOptions) -> FixtureReport {
    let mut rep = FixtureReport {
        name: f.name.clone(),
        ..Default::default()
    };
    let sig = f.source.sig.clone();

    let nf = match f.normal_form() {
        Ok(nf) => nf,
        Err(e) => {
            rep.push("normalize", Status::Fail, e);
            return rep;
        }
    };
    let nf_text = print_formula(&nf.to_formula()) + "\n";
    let same_nf = |old: &str, new: &str| {
        let a = parse_formula(old, &sig)
            .ok()
            .and_then(|g| NormalForm::from_formula(&g));
        let b = parse_formula(new, &sig)
            .ok()
            .and_then(|g| NormalForm::from_formula(&g));
        matches!((a, b), (Some(a), Some(b)) if a.equiv(&b))
    };
    frozen(
        f,
        &mut rep,
        "normalize",
        "expected.nf",
        &nf_text,
        opts,
        &same_nf,
    );

    if !f.meta.apply.is_empty() {
        let e = f.engine();
        let mut out = String::new();
        for a in &f.meta.apply {
            match apply_rule(&e, &f.source.formula, &a.rule, &a.path, &a.args) {
                Ok(g) => out += &format!("{} {}\n", a.rule, print_formula(&g)),
                Err(err) => out += &format!("{} error: {err}\n", a.rule),
            }
        }
        frozen(f, &mut rep, "apply", "expected.apply", &out, opts, &exact);
    }

    let r = match f.extract() {
        Ok(Some(r)) => r,
        Ok(None) => return rep,
        Err(e) => {
            rep.push("extract", Status::Fail, e);
            return rep;
        }
    };
    if !r.nf.equiv(&nf) {
        rep.push(
            "extract",
            Status::Fail,
            format!(
                "script conclusion is not the normal form of the source\nscript: {}",
                print_formula(&r.nf.to_formula())
            ),
        );
        return rep;
    }
    let ext_text = format!(
        "{}(sentence {})\n",
        r.witnesses_text(),
        print_formula(&r.internal_sentence)
    );
    frozen(
        f,
        &mut rep,
        "extract",
        "expected.ext",
        &ext_text,
        opts,
        &exact,
    );

    let has_mu1 = r.oracle_parameters.iter().any(|p| p.name == MU1_VAR);
    let has_mu = r.oracle_parameters.iter().any(|p| p.name == MU_VAR);
    let interp = match f.interpretation(&r.sig) {
        Ok(i) => i,
        Err(e) => {
            rep.push("verify", Status::Fail, format!("interp.int: {e}"));
            return rep;
        }
    };

    let mut r = r;
    if has_mu1 {
        rep.oracle_status = Some(ORACLE_SYMBOLIC.into());
        rep.push("oracle", Status::Skip, ORACLE_SYMBOLIC);
        rep.extraction = Some(r);
        return rep;
    }
    if has_mu {
        let Some(bound) = opts.mu_bound.or(f.meta.oracle_bound) else {
            rep.push(
                "oracle",
                Status::Fail,
                "MU2 needs an implementation (--oracle mu=bounded:M)",
            );
            return rep;
        };
        let imp = bounded_mu(bound);
        r = match instantiate_oracle(&r, &imp) {
            Ok(x) => x,
            Err(e) => {
                rep.push("oracle", Status::Fail, e.to_string());
                return rep;
            }
        };
        let Some(mut grid) = interp.clone() else {
            rep.push("oracle", Status::Fail, "no interpretation with a MU grid");
            return rep;
        };
        grid.mu_grid.extend(opts.extra_mu_grid.iter().cloned());
        match mu_grid_check(&imp, &grid) {
            Ok(m) if m.pass() => {
                rep.oracle_status = Some(ORACLE_GRID_CHECKED.into());
                rep.push(
                    "oracle",
                    Status::Pass,
                    format!(
                        "mu=bounded:{bound}, {} grid functions, {ORACLE_GRID_CHECKED}",
                        m.checked
                    ),
                );
            }
            Ok(m) => {
                rep.oracle_status = Some(ORACLE_VIOLATED.into());
                let (fun, why) = &m.violations[0];
                rep.push(
                    "oracle",
                    Status::Fail,
                    format!("mu=bounded:{bound}, {ORACLE_VIOLATED}: {why}\nfunction {fun}"),
                );
            }
            Err(e) => rep.push("oracle", Status::Fail, e.to_string()),
        }
    }

    if let Some(interp) = &interp {
        let check = match check_witness(&r.internal_sentence, &r.sig, interp) {
            Ok(c) => c,
            Err(e) => {
                rep.push("verify", Status::Fail, e.to_string());
                return rep;
            }
        };
        rep.push(
            "verify",
            if check.pass() {
                Status::Pass
            } else {
                Status::Fail
            },
            check.to_string(),
        );
        let mutation = if r.witnesses.iter().any(|w| w.ty == Type::Nat) {
            let m = strip_st(&r.nf, &decrement_all(&r))
                .map_err(|e| e.to_string())
                .and_then(|s| check_witness(&s, &r.sig, interp).map_err(|e| e.to_string()));
            match m {
                Ok(m) if !m.pass() => {
                    let first = m
                        .failures
                        .first()
                        .map(|x| x.assignment.clone())
                        .unwrap_or_default();
                    rep.push(
                        "mutation",
                        Status::Pass,
                        format!("detected, {} failed, first at {first}", m.failed),
                    );
                    Some(m)
                }
                Ok(m) => {
                    rep.push("mutation", Status::Fail, "decremented witnesses still pass");
                    Some(m)
                }
                Err(e) => {
                    rep.push("mutation", Status::Fail, e);
                    None
                }
            }
        } else {
            rep.push("mutation", Status::Skip, "no Nat witness");
            None
        };
        frozen(
            f,
            &mut rep,
            "counts",
            "expected.verify",
            &verify_text(&check, mutation.as_ref()),
            opts,
            &exact,
        );
        rep.check = Some(check);
        rep.mutation = mutation;
    }

    if r.oracle_parameters.is_empty() {
        let back = reverse_direction(&r).and_then(|s| run_script(&s));
        match back {
            Ok(b) if alpha_eq(&b.nf.to_formula(), &r.nf.to_formula()) => rep.push(
                "reverse",
                Status::Pass,
                "round trip reproduces the normal form",
            ),
            Ok(b) => rep.push(
                "reverse",
                Status::Fail,
                format!("round trip gave {}", print_formula(&b.nf.to_formula())),
            ),
            Err(e) => rep.push("reverse", Status::Fail, e.to_string()),
        }
    } else {
        rep.push("reverse", Status::Skip, "oracle parameter present");
    }
    rep.extraction = Some(r);
    rep
}

/// Runs fixtures on `opts.jobs` threads; reports come back in input order.
pub fn run(fixtures: &[&Fixture], opts: &RunOptions) -> Vec<FixtureReport> {
    let jobs = opts.jobs.max(1).min(fixtures.len().max(1));
    let next = AtomicUsize::new(0);
    let out: Vec<Mutex<Option<FixtureReport>>> =
        fixtures.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= fixtures.len() {
                    break;
                }
                let r = run_fixture(fixtures[i], opts);
                *out[i].lock().unwrap() = Some(r);
            });
        }
    });
    out.into_iter()
        .map(|m| m.into_inner().unwrap().expect("every fixture ran"))
        .collect()
}
