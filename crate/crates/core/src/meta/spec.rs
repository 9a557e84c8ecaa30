//! The parsed form of a `.lang` file.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A 1-based source position. Positions are diagnostic metadata only: two
/// `Loc`s always compare equal so that structurally identical specs parsed
/// from differently formatted sources are equal.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Loc {
    pub line: u32,
    pub col: u32,
}

impl Loc {
    pub fn new(line: u32, col: u32) -> Self {
        Loc { line, col }
    }
}

impl PartialEq for Loc {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Loc {}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LangSpec {
    pub token_decls: Vec<TokenDecl>,
    pub lexer: LexerSpec,
    pub parser: ParserSpec,
    pub compile_tests: Vec<LrTestDecl>,
    pub parse_tests: Vec<ParseTestDecl>,
}

impl LangSpec {
    pub fn token(&self, name: &str) -> Option<&TokenDecl> {
        self.token_decls.iter().find(|t| t.name == name)
    }

    pub fn is_opaque_token(&self, name: &str) -> bool {
        matches!(self.token(name), Some(t) if t.kind == TokenKind::Opaque)
    }

    pub fn has_prop(&self, prop: &str) -> bool {
        self.parser.props.iter().any(|p| p == prop)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenKind {
    /// `X <- e`: emitted by the lexer under its own name.
    Opaque,
    /// `X <= e`: a named fragment, never emitted under its own name.
    Alias,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenDecl {
    pub name: String,
    pub kind: TokenKind,
    pub pattern: RegexExpr,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegexExpr {
    Literal(String),
    CharRange(char, char),
    Concat(Vec<RegexExpr>),
    Alt(Vec<RegexExpr>),
    Star(Box<RegexExpr>),
    Plus(Box<RegexExpr>),
    Optional(Box<RegexExpr>),
    Ref(String),
    Wildcard,
    Eof,
}

impl RegexExpr {
    /// Calls `f` on every token name referenced by this pattern.
    pub fn for_each_ref<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            RegexExpr::Ref(n) => f(n),
            RegexExpr::Concat(xs) | RegexExpr::Alt(xs) => {
                xs.iter().for_each(|x| x.for_each_ref(f));
            }
            RegexExpr::Star(x) | RegexExpr::Plus(x) | RegexExpr::Optional(x) => x.for_each_ref(f),
            RegexExpr::Literal(_) | RegexExpr::CharRange(..) | RegexExpr::Wildcard | RegexExpr::Eof => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexerSpec {
    pub main_mode: String,
    pub main_loc: Loc,
    pub modes: Vec<LexerMode>,
}

impl LexerSpec {
    pub fn mode(&self, name: &str) -> Option<&LexerMode> {
        self.modes.iter().find(|m| m.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexerMode {
    pub name: String,
    pub rules: Vec<LexerRule>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexerRule {
    pub pattern: RegexExpr,
    pub actions: Vec<LexerAction>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LexerAction {
    Emit,
    Pass,
    Push(String),
    Pop,
    PopExtract,
    PopEmit(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParserSpec {
    /// Parseable top-level nonterminals; the first is the default.
    pub main_nonterms: Vec<String>,
    pub main_loc: Loc,
    pub prec_lines: Vec<PrecLine>,
    pub props: Vec<String>,
    pub attr_decls: Vec<AttrDecl>,
    pub rules: Vec<RuleDecl>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assoc {
    Left,
    Right,
    Prefix,
    Postfix,
}

impl Assoc {
    pub fn keyword(self) -> &'static str {
        match self {
            Assoc::Left => "assoc_left",
            Assoc::Right => "assoc_right",
            Assoc::Prefix => "prefix",
            Assoc::Postfix => "postfix",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Assoc> {
        Some(match s {
            "assoc_left" => Assoc::Left,
            "assoc_right" => Assoc::Right,
            "prefix" => Assoc::Prefix,
            "postfix" => Assoc::Postfix,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecLine {
    pub rules: Vec<Vec<String>>,
    pub assoc: Option<Assoc>,
    pub loc: Loc,
}

/// `attr { X.A -> I, J; }`: rule `X.A` satisfies attributes `I` and `J`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrDecl {
    pub rule: Vec<String>,
    pub attrs: Vec<String>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDecl {
    /// First component is the nonterminal, the rest the variant path.
    pub path: Vec<String>,
    pub lhs_attrs: Vec<String>,
    pub rhs: ParseExpr,
    pub loc: Loc,
}

impl RuleDecl {
    pub fn nonterm(&self) -> &str {
        &self.path[0]
    }

    pub fn dotted(&self) -> String {
        self.path.join(".")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ListFlavor {
    L,
    B,
    B2,
    T,
    T2,
}

impl ListFlavor {
    pub fn keyword(self) -> &'static str {
        match self {
            ListFlavor::L => "#L",
            ListFlavor::B => "#B",
            ListFlavor::B2 => "#B2",
            ListFlavor::T => "#T",
            ListFlavor::T2 => "#T2",
        }
    }

    pub fn from_keyword(s: &str) -> Option<ListFlavor> {
        Some(match s {
            "#L" => ListFlavor::L,
            "#B" => ListFlavor::B,
            "#B2" => ListFlavor::B2,
            "#T" => ListFlavor::T,
            "#T2" => ListFlavor::T2,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Trailing {
    None,
    Optional,
    Required,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParseExpr {
    TermLiteral(String),
    TokenRef(String),
    NontermRef {
        name: String,
        attrs: Vec<String>,
        /// `pr=*`: admits every precedence level.
        prec_any: bool,
    },
    Named(String, Box<ParseExpr>),
    Seq(Vec<ParseExpr>),
    AltBranches(Vec<(Option<String>, ParseExpr)>),
    SingletonAlt(Option<String>, Box<ParseExpr>),
    Star(Box<ParseExpr>),
    Plus(Box<ParseExpr>),
    Optional(Box<ParseExpr>),
    ListExpr {
        flavor: ListFlavor,
        elem: Box<ParseExpr>,
        min: u8,
        delim: Box<ParseExpr>,
        trailing: Trailing,
    },
    PassString(String),
    SpaceShorthand,
    Eps,
    Unfold(Box<ParseExpr>),
}

impl ParseExpr {
    pub fn nonterm(name: &str) -> ParseExpr {
        ParseExpr::NontermRef { name: name.to_string(), attrs: vec![], prec_any: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseTestDecl {
    pub input: String,
    /// Byte offset of the removed `##` marker, if the test expects failure.
    pub expected_fail_offset: Option<usize>,
    pub skip_roundtrip: bool,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrTestDecl {
    pub k: usize,
    pub expect_success: bool,
    pub loc: Loc,
}

/// Splits a decoded test string at its `##` failure marker.
pub fn strip_fail_marker(s: &str) -> (String, Option<usize>) {
    match s.find("##") {
        Some(i) => {
            let mut out = String::with_capacity(s.len() - 2);
            out.push_str(&s[..i]);
            out.push_str(&s[i + 2..]);
            (out, Some(i))
        }
        None => (s.to_string(), None),
    }
}
