//! The bootstrap frontend for `.lang` language specifications.


pub mod from_node;
pub mod lex;
pub mod parse;
pub mod render;
pub mod spec;
mod validate;

pub use from_node::spec_from_value;
pub use render::render_lang_spec;
pub use spec::*;
pub use validate::validate_spec;

use std::fmt;

/// A located frontend message. `Display` renders `line:col: message`; the
/// CLI prefixes the file name.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct Diagnostic {
    pub loc: Loc,
    pub message: String,
}

impl Diagnostic {
    pub fn new(loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic { loc, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.loc, self.message)
    }
}

/// Diagnostics from a failed frontend run.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct Diagnostics(pub Vec<Diagnostic>);

/// Parses and validates a `.lang` source.
pub fn parse_lang_spec(source: &str) -> Result<LangSpec, Diagnostics> {
    let spec = parse::parse_syntax(source).map_err(|d| Diagnostics(vec![d]))?;
    finish(spec)
}

/// Shared tail of both frontends: resolves identifiers and validates.
pub(crate) fn finish(mut spec: LangSpec) -> Result<LangSpec, Diagnostics> {
    let mut diags = resolve_refs(&mut spec);
    diags.extend(validate_spec(&spec));
    if diags.is_empty() {
        Ok(spec)
    } else {
        Err(Diagnostics(diags))
    }
}

/// Rewrites parser identifiers that name opaque tokens into token references.
pub fn resolve_refs(spec: &mut LangSpec) -> Vec<Diagnostic> {
    let opaque: std::collections::BTreeSet<String> = spec
        .token_decls
        .iter()
        .filter(|t| t.kind == TokenKind::Opaque)
        .map(|t| t.name.clone())
        .collect();
    let mut diags = Vec::new();
    for rule in &mut spec.parser.rules {
        let loc = rule.loc;
        resolve_expr(&mut rule.rhs, &opaque, &mut |m| diags.push(Diagnostic::new(loc, m)));
    }
    diags
}

fn resolve_expr(e: &mut ParseExpr, opaque: &std::collections::BTreeSet<String>, err: &mut impl FnMut(String)) {
    match e {
        ParseExpr::NontermRef { name, attrs, prec_any } => {
            if opaque.contains(name.as_str()) {
                if !attrs.is_empty() || *prec_any {
                    err(format!("token `{name}` cannot carry attribute requirements"));
                }
                *e = ParseExpr::TokenRef(std::mem::take(name));
            }
        }
        ParseExpr::Named(_, x)
        | ParseExpr::SingletonAlt(_, x)
        | ParseExpr::Star(x)
        | ParseExpr::Plus(x)
        | ParseExpr::Optional(x)
        | ParseExpr::Unfold(x) => resolve_expr(x, opaque, err),
        ParseExpr::Seq(xs) => xs.iter_mut().for_each(|x| resolve_expr(x, opaque, err)),
        ParseExpr::AltBranches(bs) => bs.iter_mut().for_each(|(_, x)| resolve_expr(x, opaque, err)),
        ParseExpr::ListExpr { elem, delim, .. } => {
            resolve_expr(elem, opaque, err);
            resolve_expr(delim, opaque, err);
        }
        ParseExpr::TermLiteral(_)
        | ParseExpr::TokenRef(_)
        | ParseExpr::PassString(_)
        | ParseExpr::SpaceShorthand
        | ParseExpr::Eps => {}
    }
}
