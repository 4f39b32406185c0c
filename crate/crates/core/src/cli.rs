//! Command-line front end. Exit codes: 0 success, 1 a check failed or a
//! fixture regressed, 2 bad usage or unreadable input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::corpus::{self, RunOptions};
use crate::eval::{normalize_with_budget, DEFAULT_BUDGET};
use crate::extract::{
    bounded_mu, instantiate_oracle, parse_script, parse_witnesses, run_script, strip_st,
};
use crate::rewrite::{normalize_to_normal_form, Engine, Mode, NormalForm};
use crate::syntax::ast::{Document, Signature};
use crate::syntax::parse::{parse_document, parse_term_sexp, split_preamble};
use crate::syntax::print::{print_document, print_formula};
use crate::syntax::sexp::read_all;
use crate::verify::cutoff::sizes_up_to;
use crate::verify::{check_witness, cutoff_check, schema, schemas, CutoffOptions, Interpretation};

#[derive(Parser, Debug)]
#[command(
    name = "nsa",
    version,
    about = "Normal forms, term extraction and finite checks for nonstandard arithmetic"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Rewrite a formula document to its normal form.
    Normalize {
        file: PathBuf,
        #[arg(long, default_value = "P")]
        mode: Mode,
        /// Write the rewrite trace to a file, or to stdout when no file is given.
        #[arg(long, num_args = 0..=1, value_name = "FILE")]
        trace: Option<Option<PathBuf>>,
        /// Write the normal form, with the declarations, to a file instead of stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Run an extraction script.
    Extract {
        script: PathBuf,
        /// Source document: its declarations, and its formula as the default start.
        #[arg(long)]
        source: Option<PathBuf>,
        /// Implementation for MU2, `mu=bounded:M`.
        #[arg(long)]
        oracle: Option<String>,
        /// Write the witness file here.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Write the internal sentence here.
        #[arg(long = "emit-internal")]
        emit_internal: Option<PathBuf>,
    },
    /// Check an internal sentence, or a normal form with witnesses, on a finite interpretation.
    ///
    /// Positional forms: `verify SENTENCE INTERP` and `verify NF WITNESSES INTERP`.
    Verify {
        file: PathBuf,
        #[arg(num_args = 0..=2)]
        rest: Vec<PathBuf>,
        #[arg(long)]
        interp: Option<PathBuf>,
        /// Witness file; FILE is then the normal form they are for.
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Evaluate a closed term (a document: preamble forms, then one term).
    Eval {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check axiom schemas under cutoff semantics.
    SchemaCheck {
        /// Schema names; all when empty.
        schemas: Vec<String>,
        #[arg(long, default_value_t = 2)]
        max_k: u64,
        #[arg(long, alias = "max-size", default_value_t = 5)]
        max_m: u64,
        /// Error out instead of sampling past the branch budget.
        #[arg(long)]
        exhaustive: bool,
    },
    /// The fixture corpus.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum CorpusCmd {
    /// Table of fixtures with their anchors.
    List { selectors: Vec<String> },
    /// Run fixtures against their frozen expectations.
    Run(CorpusRun),
}

#[derive(Args, Debug)]
pub struct CorpusRun {
    /// Fixture names or tags; all when empty.
    pub selectors: Vec<String>,
    /// Rewrite the expected files from the current output.
    #[arg(long)]
    pub bless: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Implementation for MU2, `mu=bounded:M`.
    #[arg(long)]
    pub oracle: Option<String>,
}

struct Fail(i32, String);

fn input<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> Fail + '_ {
    move |e| Fail(2, format!("{what}: {e}"))
}

fn read(p: &PathBuf) -> Result<String, Fail> {
    fs::read_to_string(p).map_err(input(&p.display().to_string()))
}

fn write(p: &PathBuf, text: &str) -> Result<(), Fail> {
    fs::write(p, text).map_err(input(&p.display().to_string()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.cmd, out, err) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Fail> {
    let mut say = |s: String| {
        let _ = write!(out, "{s}");
    };
    match cmd {
        Cmd::Normalize {
            file,
            mode,
            trace,
            emit,
        } => {
            let doc = parse_document(&read(&file)?).map_err(input("parse"))?;
            let (nf, tr) =
                normalize_to_normal_form(&Engine::new(doc.sig.clone(), mode), &doc.formula)
                    .map_err(|e| Fail(1, e.to_string()))?;
            match trace {
                Some(Some(p)) => write(&p, &tr.to_text(&doc.formula))?,
                Some(None) => say(tr.to_text(&doc.formula)),
                None => {}
            }
            match emit {
                Some(p) => {
                    let d = Document {
                        sig: doc.sig.clone(),
                        formula: nf.to_formula(),
                    };
                    write(&p, &(print_document(&d) + "\n"))?
                }
                None => say(print_formula(&nf.to_formula()) + "\n"),
            }
            Ok(0)
        }
        Cmd::Extract {
            script,
            source,
            oracle,
            emit,
            emit_internal,
        } => {
            let (base, start) = match &source {
                Some(p) => {
                    let d = parse_document(&read(p)?).map_err(input("source"))?;
                    (d.sig, Some(d.formula))
                }
                None => (Signature::default(), None),
            };
            let mut s = parse_script(&read(&script)?, &base).map_err(input("script"))?;
            if s.start.is_none() {
                s.start = start;
            }
            let mut r = run_script(&s).map_err(|e| Fail(1, e.to_string()))?;
            if let Some(o) = oracle {
                let bound = corpus::parse_oracle_spec(&o).map_err(|e| Fail(2, e))?;
                r = instantiate_oracle(&r, &bounded_mu(bound))
                    .map_err(|e| Fail(1, e.to_string()))?;
                if r.oracle_approximated {
                    let _ = writeln!(err, "note: {}", corpus::ORACLE_GRID_CHECKED);
                }
            }
            let sentence = print_formula(&r.internal_sentence) + "\n";
            match &emit {
                Some(p) => write(p, &r.witnesses_text())?,
                None => say(r.witnesses_text()),
            }
            match &emit_internal {
                Some(p) => write(p, &sentence)?,
                None => say(format!("(sentence {})\n", sentence.trim_end())),
            }
            for n in &r.notes {
                let _ = writeln!(err, "; {n}");
            }
            Ok(0)
        }
        Cmd::Verify {
            file,
            mut rest,
            interp,
            witnesses,
        } => {
            let (witnesses, interp) = match (rest.len(), witnesses, interp) {
                (0, w, Some(i)) => (w, i),
                (1, w, None) => (w, rest.remove(0)),
                (2, None, None) => (Some(rest.remove(0)), rest.remove(0)),
                _ => {
                    return Err(Fail(
                        2,
                        "give the interpretation once, positionally or with --interp".into(),
                    ))
                }
            };
            let doc = parse_document(&read(&file)?).map_err(input("parse"))?;
            let sentence = match &witnesses {
                None => doc.formula.clone(),
                Some(w) => {
                    let nf = NormalForm::from_formula(&doc.formula).ok_or_else(|| {
                        Fail(
                            2,
                            "with --witnesses the file must hold a normal form".into(),
                        )
                    })?;
                    let ws = parse_witnesses(&read(w)?, &doc.sig).map_err(input("witnesses"))?;
                    strip_st(&nf, &ws).map_err(|e| Fail(1, e.to_string()))?
                }
            };
            let i = Interpretation::parse(&read(&interp)?, &doc.sig).map_err(input("interp"))?;
            let rep = check_witness(&sentence, &doc.sig, &i).map_err(|e| Fail(2, e.to_string()))?;
            say(format!("{rep}\n"));
            Ok(if rep.pass() { 0 } else { 1 })
        }
        Cmd::Eval { file, budget } => {
            let text = read(&file)?;
            let forms = read_all(&text).map_err(input("parse"))?;
            let mut sig = Signature::default();
            let rest = split_preamble(&forms, &mut sig).map_err(input("parse"))?;
            let [t] = rest.as_slice() else {
                return Err(Fail(
                    2,
                    format!("expected one term after the preamble, found {}", rest.len()),
                ));
            };
            let t = parse_term_sexp(t, &sig).map_err(input("parse"))?;
            let v = normalize_with_budget(&t, budget).map_err(|e| Fail(2, e.to_string()))?;
            say(format!("{v}\n"));
            Ok(0)
        }
        Cmd::SchemaCheck {
            schemas: names,
            max_k,
            max_m,
            exhaustive,
        } => {
            let list = if names.is_empty() {
                schemas()
            } else {
                names
                    .iter()
                    .map(|n| schema(n))
                    .collect::<Result<_, _>>()
                    .map_err(|e| Fail(2, e.to_string()))?
            };
            let mut opts = CutoffOptions::default();
            if exhaustive {
                opts.samples = None;
            }
            let sizes = sizes_up_to(max_k, max_m);
            let mut code = 0;
            for s in &list {
                let rep = cutoff_check(s, &sizes, &opts).map_err(|e| Fail(1, e.to_string()))?;
                let expect = if s.expect_valid { "valid" } else { "refutable" };
                let agrees = rep.pass() == s.expect_valid;
                if !agrees {
                    code = 1;
                }
                say(format!(
                    "{:<5} expected {expect}, {}: {rep}\n",
                    s.name,
                    if agrees { "as expected" } else { "UNEXPECTED" }
                ));
            }
            Ok(code)
        }
        Cmd::Corpus { cmd } => {
            let root = corpus::default_root();
            let all = corpus::load(&root).map_err(|e| Fail(2, e.to_string()))?;
            match cmd {
                CorpusCmd::List { selectors } => {
                    let (chosen, unknown) = corpus::select(&all, &selectors);
                    for u in unknown {
                        let _ = writeln!(err, "warning: no fixture or tag `{u}`");
                    }
                    say(corpus::list_table(&chosen));
                    Ok(0)
                }
                CorpusCmd::Run(r) => {
                    let (chosen, unknown) = corpus::select(&all, &r.selectors);
                    for u in unknown {
                        let _ = writeln!(err, "warning: no fixture or tag `{u}`");
                    }
                    let mu_bound = match &r.oracle {
                        Some(o) => Some(corpus::parse_oracle_spec(o).map_err(|e| Fail(2, e))?),
                        None => None,
                    };
                    let opts = RunOptions {
                        bless: r.bless,
                        jobs: r.jobs,
                        mu_bound,
                        extra_mu_grid: vec![],
                    };
                    let reports = corpus::run(&chosen, &opts);
                    let failed = reports.iter().filter(|x| x.regression()).count();
                    for x in &reports {
                        say(x.to_string());
                    }
                    say(format!(
                        "{} fixtures, {failed} regressions\n",
                        reports.len()
                    ));
                    Ok(if failed > 0 { 1 } else { 0 })
                }
            }
        }
    }
}
