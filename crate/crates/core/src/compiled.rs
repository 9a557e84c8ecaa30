//! Whole-language compilation and the serialized artifact.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::datacc::{DataError, DataValue, DatatypeSchema, TypeExpr};
use crate::grammar::{lower_grammar, Cfg, Lowered, PrintTemplates};
use crate::lexer::{compile_lexer, lex, LexCompileError, LexOutput, LexerProgram};
use crate::lr::{build_lr, LrAutomaton, LrBuildError, LrOptions, LrTables};
use crate::meta::{Diagnostics, LangSpec};
use crate::printer::{first_divergence, pretty_print, PrintError};
use crate::runtime::{parse_tokens, Bounds, Node, ParseError, ParseErrorKind, Value};
use crate::trace::{render_conflict_report, TraceError, Tracer};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    /// First lookahead length tried.
    pub k: usize,
    /// Lookahead is raised up to this bound while conflicts remain.
    pub max_k: usize,
    pub rd: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { k: 1, max_k: 2, rd: false }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CompileError {
    #[error("{0}")]
    Spec(Diagnostics),
    #[error("{0}")]
    Lexer(#[from] LexCompileError),
    #[error("{0}")]
    Grammar(Diagnostics),
    #[error("{0}")]
    Lr(#[from] LrBuildError),
    #[error("{count} LR conflict(s) at k = {k}")]
    Conflicts { k: usize, count: usize, report: String },
}

/// Everything needed to lex, parse and print one language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledLang {
    pub version: u32,
    pub name: String,
    pub lexer: LexerProgram,
    pub cfg: Cfg,
    pub tables: LrTables,
    pub schema: DatatypeSchema,
    pub templates: PrintTemplates,
    pub notices: Vec<String>,
    /// SHA-256 of the `.lang` bytes, when compiled from source.
    pub source_digest: Option<String>,
}

/// A successful compilation with the intermediate products kept for dumps.
pub struct Compilation {
    pub lang: CompiledLang,
    pub automaton: LrAutomaton,
}

/// Builds the automaton, raising k up to `max_k`; on failure the error
/// carries the rendered conflict report for the last k tried.
pub fn build_tables(cfg: &Cfg, opts: CompileOptions) -> Result<LrAutomaton, CompileError> {
    let mut k = opts.k;
    loop {
        let a = build_lr(cfg, k, LrOptions { rd: opts.rd })?;
        if a.conflicts.is_empty() {
            return Ok(a);
        }
        if k >= opts.max_k {
            return Err(CompileError::Conflicts { k, count: a.conflicts.len(), report: conflict_report(cfg, &a) });
        }
        k += 1;
    }
}

pub fn conflict_report(cfg: &Cfg, a: &LrAutomaton) -> String {
    let tracer = Tracer::new(cfg, a);
    let mut exs = Vec::new();
    let mut notes = String::new();
    for r in tracer.trace_all() {
        match r {
            Ok(ex) => exs.push(ex),
            Err(TraceError::SearchBudgetExceeded { state, partial }) => {
                notes.push_str(&format!("    (state {state}: search budget exceeded; completions omitted)\n"));
                exs.push(*partial);
            }
            Err(e) => notes.push_str(&format!("    ({e})\n")),
        }
    }
    let mut out = render_conflict_report(&exs);
    out.push_str(&notes);
    out
}

pub fn compile_spec(spec: &LangSpec, name: &str, opts: CompileOptions) -> Result<Compilation, CompileError> {
    let lexer = compile_lexer(spec)?;
    let lowered = lower_grammar(spec, &lexer.terminals).map_err(CompileError::Grammar)?;
    let automaton = build_tables(&lowered.cfg, opts)?;
    let lang = CompiledLang::assemble(name, lexer, lowered, &automaton);
    Ok(Compilation { lang, automaton })
}

pub fn compile_source(src: &str, name: &str, opts: CompileOptions) -> Result<Compilation, CompileError> {
    let spec = crate::meta::parse_lang_spec(src).map_err(CompileError::Spec)?;
    let mut c = compile_spec(&spec, name, opts)?;
    c.lang.source_digest = Some(source_digest(src));
    Ok(c)
}

pub fn source_digest(src: &str) -> String {
    hex::encode(Sha256::digest(src.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArtifactError {
    #[error("malformed artifact: {0}")]
    Malformed(String),
    #[error("artifact format version {found} is not supported (expected {FORMAT_VERSION})")]
    Version { found: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RoundTripError {
    #[error("{0}")]
    Parse(ParseError),
    #[error("{0}")]
    Print(PrintError),
}

/// Mirrors the generated API: exactly one of `result`/`err` is present.
#[derive(Debug, Clone)]
pub struct ParseResult {
    pub result: Option<Value>,
    pub err: Option<ParseError>,
    pub lex: Option<LexOutput>,
}

impl ParseResult {
    pub fn is_success(&self) -> bool {
        self.result.is_some()
    }
}

impl CompiledLang {
    /// Packages the stage outputs; `automaton` must be conflict-free.
    pub fn assemble(name: &str, lexer: LexerProgram, lowered: Lowered, automaton: &LrAutomaton) -> CompiledLang {
        let Lowered { cfg, schema, templates } = lowered;
        let tables = LrTables::from_automaton(automaton, &cfg.starts, cfg.terminals.len());
        CompiledLang {
            version: FORMAT_VERSION,
            name: name.to_string(),
            lexer,
            cfg,
            tables,
            schema,
            templates,
            notices: automaton.notices.clone(),
            source_digest: None,
        }
    }

    /// Deterministic JSON: every map in the artifact is ordered.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("artifact serializes")
    }

    pub fn from_json(s: &str) -> Result<CompiledLang, ArtifactError> {
        let mut l: CompiledLang = serde_json::from_str(s).map_err(|e| ArtifactError::Malformed(e.to_string()))?;
        if l.version != FORMAT_VERSION {
            return Err(ArtifactError::Version { found: l.version });
        }
        l.lexer.terminals.reindex();
        l.cfg.terminals.reindex();
        l.tables.reindex(l.cfg.terminals.len());
        Ok(l)
    }

    /// SHA-256 of the JSON form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    fn start_nt(&self, start: Option<&str>) -> Option<u32> {
        match start {
            None => self.cfg.starts.first().copied(),
            Some(s) => self.cfg.starts.iter().copied().find(|&n| self.cfg.nt_name(n) == s),
        }
    }

    pub fn main_names(&self) -> Vec<&str> {
        self.cfg.starts.iter().map(|&n| self.cfg.nt_name(n)).collect()
    }

    /// `start` must name a main nonterminal; `None` picks the first.
    pub fn parse_ext(&self, input: &str, start: Option<&str>) -> ParseResult {
        let nt = self.start_nt(start).unwrap_or_else(|| panic!("`{}` is not a main nonterminal", start.unwrap_or("")));
        let out = match lex(&self.lexer, input) {
            Ok(o) => o,
            Err(e) => {
                let at = e.offset(input.len());
                let end = input[at..].chars().next().map(|c| at + c.len_utf8()).unwrap_or(at);
                let err = ParseError {
                    message: format!("Lexical error: {e}"),
                    kind: ParseErrorKind::Lex(e),
                    bounds: Bounds::new(at, end),
                };
                return ParseResult { result: None, err: Some(err), lex: None };
            }
        };
        match parse_tokens(&self.cfg, &self.tables, &out.tokens, input.len(), nt) {
            Ok(v) => ParseResult { result: Some(v), err: None, lex: Some(out) },
            Err(e) => ParseResult { result: None, err: Some(e), lex: Some(out) },
        }
    }

    pub fn parse(&self, input: &str, start: Option<&str>) -> Result<Value, ParseError> {
        let r = self.parse_ext(input, start);
        match r.result {
            Some(v) => Ok(v),
            None => Err(r.err.expect("error on failure")),
        }
    }

    pub fn pretty_print(&self, v: &Value) -> Result<String, PrintError> {
        pretty_print(&self.templates, v)
    }

    /// `Ok(None)` when printing the parse reproduces `s`; otherwise the
    /// first diverging byte offset.
    pub fn roundtrip_check(&self, s: &str, start: Option<&str>) -> Result<Option<usize>, RoundTripError> {
        let v = self.parse(s, start).map_err(RoundTripError::Parse)?;
        let printed = self.pretty_print(&v).map_err(RoundTripError::Print)?;
        Ok(first_divergence(&printed, s))
    }

    /// Present iff the node's variant path starts with `path`.
    pub fn node_downcast(&self, n: &Arc<Node>, path: &[&str]) -> Result<Option<Arc<Node>>, DataError> {
        let owned: Vec<String> = path.iter().map(|s| s.to_string()).collect();
        if self.schema.resolve_path(&owned).is_none() {
            return Err(DataError::UnknownPath(path.join(".")));
        }
        Ok(n.is(path).then(|| n.clone()))
    }

    /// The tree as a datacc value, for schema checks and hashing.
    pub fn to_data_value(v: &Value) -> DataValue {
        match v {
            Value::Token(t) => DataValue::str(t.text.clone()),
            Value::Bool(b) => DataValue::bool(*b),
            Value::Opt(x) => DataValue::opt(x.as_deref().map(Self::to_data_value)),
            Value::Seq(s) => DataValue::seq(s.items.iter().map(Self::to_data_value).collect()),
            Value::Node(n) => {
                let path: Vec<&str> = n.ty.iter().map(|s| s.as_str()).collect();
                let fields = n.fields.iter().map(|(f, x)| (f.as_str(), Self::to_data_value(x))).collect();
                DataValue::record(&path, fields)
            }
        }
    }

    /// Checks a parse result against the generated AST schema.
    pub fn check_schema(&self, v: &Value) -> Result<(), DataError> {
        let n = v.as_node().ok_or_else(|| DataError::Invalid("top-level value is not a node".into()))?;
        self.schema.check(&Self::to_data_value(v), &TypeExpr::named(&n.ty[0]))
    }
}
