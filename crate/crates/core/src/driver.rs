//! Embedded `compile_test` and `test` stanzas.

use std::fmt::Write;

use crate::compiled::CompiledLang;
use crate::grammar::Cfg;
use crate::lr::{build_lr, LrOptions};
use crate::meta::LangSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LrTestOutcome {
    pub k: usize,
    pub expect_success: bool,
    pub conflicts: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseOutcome {
    /// Parsed; `roundtrip` is the first diverging byte, `None` if identical
    /// or not checked.
    Parsed { roundtrip: Option<usize>, checked: bool },
    Failed { offset: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseTestOutcome {
    pub input: String,
    pub expected_fail: Option<usize>,
    pub outcome: ParseOutcome,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TestReport {
    pub lr: Vec<LrTestOutcome>,
    pub parse: Vec<ParseTestOutcome>,
}

impl TestReport {
    pub fn passed(&self) -> bool {
        self.lr.iter().all(|t| t.pass) && self.parse.iter().all(|t| t.pass)
    }

    pub fn failures(&self) -> usize {
        self.lr.iter().filter(|t| !t.pass).count() + self.parse.iter().filter(|t| !t.pass).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for t in &self.lr {
            let want = if t.expect_success { "" } else { "!" };
            let _ = writeln!(
                out,
                "{} {want}LR({}): {} conflict(s)",
                if t.pass { "ok  " } else { "FAIL" },
                t.k,
                t.conflicts
            );
        }
        for t in &self.parse {
            let status = if t.pass { "ok  " } else { "FAIL" };
            let detail = match (&t.outcome, t.expected_fail) {
                (ParseOutcome::Failed { offset, message }, Some(e)) => {
                    format!("expected failure at {e}, failed at {offset}: {message}")
                }
                (ParseOutcome::Failed { offset, message }, None) => format!("failed at {offset}: {message}"),
                (ParseOutcome::Parsed { .. }, Some(e)) => format!("expected failure at {e}, but parsed"),
                (ParseOutcome::Parsed { roundtrip: Some(d), .. }, None) => format!("round trip differs at byte {d}"),
                (ParseOutcome::Parsed { checked: true, .. }, None) => "parsed, round trip ok".into(),
                (ParseOutcome::Parsed { .. }, None) => "parsed".into(),
            };
            let _ = writeln!(out, "{status} {:?}: {detail}", t.input);
        }
        out
    }
}

/// `LR(k)` passes iff the automaton at that k has no conflicts; `!LR(k)`
/// iff it has some.
pub fn run_compile_tests(spec: &LangSpec, cfg: &Cfg, rd: bool) -> Vec<LrTestOutcome> {
    spec.compile_tests
        .iter()
        .map(|t| {
            let conflicts = match build_lr(cfg, t.k, LrOptions { rd }) {
                Ok(a) => a.conflicts.len(),
                Err(_) => usize::MAX,
            };
            let ok = conflicts == 0;
            LrTestOutcome { k: t.k, expect_success: t.expect_success, conflicts, pass: ok == t.expect_success }
        })
        .collect()
}

/// Parses every test string with the default main nonterminal. Failing tests
/// must fail exactly at the marker; the others must print back unchanged
/// unless marked `<<>>`.
pub fn run_parse_tests(spec: &LangSpec, lang: &CompiledLang) -> Vec<ParseTestOutcome> {
    spec.parse_tests
        .iter()
        .map(|t| {
            let outcome = match lang.parse(&t.input, None) {
                Err(e) => ParseOutcome::Failed { offset: e.offset(), message: e.message.clone() },
                Ok(v) => {
                    if t.skip_roundtrip || t.expected_fail_offset.is_some() {
                        ParseOutcome::Parsed { roundtrip: None, checked: false }
                    } else {
                        let roundtrip = match lang.pretty_print(&v) {
                            Ok(p) => crate::printer::first_divergence(&p, &t.input),
                            Err(_) => Some(0),
                        };
                        ParseOutcome::Parsed { roundtrip, checked: true }
                    }
                }
            };
            let pass = match (&outcome, t.expected_fail_offset) {
                (ParseOutcome::Failed { offset, .. }, Some(e)) => *offset == e,
                (ParseOutcome::Parsed { roundtrip, .. }, None) => roundtrip.is_none(),
                _ => false,
            };
            ParseTestOutcome { input: t.input.clone(), expected_fail: t.expected_fail_offset, outcome, pass }
        })
        .collect()
}

pub fn run_tests(spec: &LangSpec, lang: &CompiledLang, rd: bool) -> TestReport {
    TestReport { lr: run_compile_tests(spec, &lang.cfg, rd), parse: run_parse_tests(spec, lang) }
}

#[derive(Debug, thiserror::Error)]
pub enum BootstrapError {
    #[error("{0}")]
    Compile(#[from] crate::compiled::CompileError),
    #[error("the generated parser rejects its own source: {0}")]
    Parse(String),
    #[error("{0}")]
    Convert(crate::meta::Diagnostics),
    #[error("generated and hand frontends disagree")]
    Mismatch { hand: Box<LangSpec>, generated: Box<LangSpec> },
}

/// Self-hosting check: compiles the dialect description `src`, re-parses
/// `src` with the generated parser and compares the resulting spec with the
/// hand frontend's reading of the same text.
pub fn bootstrap(src: &str, opts: crate::compiled::CompileOptions) -> Result<LangSpec, BootstrapError> {
    let hand = crate::meta::parse_lang_spec(src).map_err(|d| BootstrapError::Compile(crate::compiled::CompileError::Spec(d)))?;
    let c = crate::compiled::compile_spec(&hand, "meta", opts)?;
    let tree = c.lang.parse(src, None).map_err(|e| BootstrapError::Parse(e.render(src)))?;
    let generated = crate::meta::spec_from_value(src, &tree).map_err(BootstrapError::Convert)?;
    if generated != hand {
        return Err(BootstrapError::Mismatch { hand: Box::new(hand), generated: Box::new(generated) });
    }
    Ok(generated)
}
