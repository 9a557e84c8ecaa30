//! Converts a tree produced by the parser generated from `fixtures/meta.lang`
//! into a [`LangSpec`], normalizing exactly as the hand parser does.

use super::lex::unescape;
use super::parse::{add_attr_reqs, single_char, singleton_alt, split_label};
use super::spec::*;
use super::{finish, Diagnostic, Diagnostics};
use crate::lexer::LineIndex;
use crate::runtime::{Node, Value};

type CResult<T> = Result<T, Diagnostic>;

/// Builds and validates a spec from a `Spec` tree over `src`.
pub fn spec_from_value(src: &str, v: &Value) -> Result<LangSpec, Diagnostics> {
    let cx = Conv { lines: LineIndex::new(src) };
    let spec = cx.spec(v).map_err(|d| Diagnostics(vec![d]))?;
    finish(spec)
}

struct Conv<'a> {
    lines: LineIndex<'a>,
}

impl Conv<'_> {
    fn loc(&self, v: &Value) -> Loc {
        let at = v.bounds().map(|b| b.start).unwrap_or(0);
        let lc = self.lines.line_col(at);
        Loc::new(lc.line, lc.col)
    }

    fn malformed<T>(&self, v: &Value, what: &str) -> CResult<T> {
        Err(Diagnostic::new(self.loc(v), format!("malformed tree: expected {what}")))
    }

    fn node<'v>(&self, v: &'v Value, what: &str) -> CResult<&'v Node> {
        match v.as_node() {
            Some(n) => Ok(n),
            None => self.malformed(v, what),
        }
    }

    fn field<'v>(&self, n: &'v Node, name: &str) -> CResult<&'v Value> {
        n.field(name).ok_or_else(|| {
            let lc = self.lines.line_col(n.bounds.start);
            Diagnostic::new(Loc::new(lc.line, lc.col), format!("malformed tree: missing field `{name}`"))
        })
    }

    fn items<'v>(&self, n: &'v Node, name: &str) -> CResult<&'v [Value]> {
        let v = self.field(n, name)?;
        match v.as_seq() {
            Some(s) => Ok(&s.items),
            None => self.malformed(v, "a list"),
        }
    }

    fn opt<'v>(&self, n: &'v Node, name: &str) -> CResult<Option<&'v Value>> {
        match self.field(n, name)? {
            Value::Opt(o) => Ok(o.as_deref()),
            v => self.malformed(v, "an optional"),
        }
    }

    fn flag(&self, n: &Node, name: &str) -> CResult<bool> {
        match self.field(n, name)? {
            Value::Bool(b) => Ok(*b),
            v => self.malformed(v, "a flag"),
        }
    }

    fn text(&self, v: &Value) -> CResult<String> {
        match v.as_token() {
            Some(t) => Ok(t.text.clone()),
            None => self.malformed(v, "a token"),
        }
    }

    fn text_of(&self, n: &Node, name: &str) -> CResult<String> {
        self.text(self.field(n, name)?)
    }

    /// Decodes a backtick literal token.
    fn string(&self, v: &Value) -> CResult<String> {
        let raw = self.text(v)?;
        let body = raw
            .strip_prefix('`')
            .and_then(|r| r.strip_suffix('`'))
            .ok_or_else(|| Diagnostic::new(self.loc(v), "malformed backtick literal"))?;
        unescape(body).map_err(|m| Diagnostic::new(self.loc(v), m))
    }

    fn path(&self, v: &Value) -> CResult<Vec<String>> {
        let n = self.node(v, "a path")?;
        self.items(n, "segs")?.iter().map(|s| self.text(s)).collect()
    }

    fn names(&self, n: &Node, field: &str) -> CResult<Vec<String>> {
        self.items(n, field)?.iter().map(|s| self.text(s)).collect()
    }

    fn spec(&self, v: &Value) -> CResult<LangSpec> {
        let n = self.node(v, "a spec")?;
        let token_decls = self.items(n, "toks")?.iter().map(|t| self.token_decl(t)).collect::<CResult<_>>()?;
        let lexer = self.lexer(self.field(n, "lex")?)?;
        let parser = self.parser(self.field(n, "par")?)?;
        let mut compile_tests = Vec::new();
        if let Some(ct) = self.opt(n, "ctests")? {
            for t in self.items(self.node(ct, "compile tests")?, "tests")? {
                let tn = self.node(t, "an LR test")?;
                let kv = self.field(tn, "k")?;
                let k = self
                    .text(kv)?
                    .parse::<u64>()
                    .map_err(|_| Diagnostic::new(self.loc(kv), "integer literal out of range"))?;
                compile_tests.push(LrTestDecl { k: k as usize, expect_success: !self.flag(tn, "neg")?, loc: self.loc(t) });
            }
        }
        let mut parse_tests = Vec::new();
        if let Some(pt) = self.opt(n, "ptests")? {
            for t in self.items(self.node(pt, "parse tests")?, "tests")? {
                let tn = self.node(t, "a parse test")?;
                let raw = self.string(self.field(tn, "s")?)?;
                let (input, expected_fail_offset) = strip_fail_marker(&raw);
                parse_tests.push(ParseTestDecl {
                    input,
                    expected_fail_offset,
                    skip_roundtrip: self.flag(tn, "skip")?,
                    loc: self.loc(t),
                });
            }
        }
        Ok(LangSpec { token_decls, lexer, parser, compile_tests, parse_tests })
    }

    fn token_decl(&self, v: &Value) -> CResult<TokenDecl> {
        let n = self.node(v, "a token declaration")?;
        let kind = match self.node(self.field(n, "kind")?, "a token kind")?.ty.last().map(String::as_str) {
            Some("Opaque") => TokenKind::Opaque,
            _ => TokenKind::Alias,
        };
        Ok(TokenDecl { name: self.text_of(n, "name")?, kind, pattern: self.regex(self.field(n, "pat")?)?, loc: self.loc(v) })
    }

    fn regex(&self, v: &Value) -> CResult<RegexExpr> {
        let n = self.node(v, "a pattern")?;
        let mut alts = Vec::new();
        for s in self.items(n, "alts")? {
            let sn = self.node(s, "a pattern sequence")?;
            let mut items = self.items(sn, "items")?.iter().map(|p| self.regex_post(p)).collect::<CResult<Vec<_>>>()?;
            alts.push(if items.len() == 1 { items.pop().unwrap() } else { RegexExpr::Concat(items) });
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { RegexExpr::Alt(alts) })
    }

    fn regex_post(&self, v: &Value) -> CResult<RegexExpr> {
        let n = self.node(v, "a pattern item")?;
        let mut e = self.regex_atom(self.field(n, "atom")?)?;
        for op in self.items(n, "ops")? {
            let b = Box::new(e);
            e = match self.node(op, "a pattern operator")?.ty.get(1).map_or("", String::as_str) {
                "Star" => RegexExpr::Star(b),
                "Plus" => RegexExpr::Plus(b),
                _ => RegexExpr::Optional(b),
            };
        }
        Ok(e)
    }

    fn regex_atom(&self, v: &Value) -> CResult<RegexExpr> {
        let n = self.node(v, "a pattern atom")?;
        Ok(match n.ty.get(1).map_or("", String::as_str) {
            "Lit" => RegexExpr::Literal(self.string(self.field(n, "s")?)?),
            "Range" => {
                let lo = self.string(self.field(n, "lo")?)?;
                let hi = self.string(self.field(n, "hi")?)?;
                let (lo, hi) = match (single_char(&lo), single_char(&hi)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(Diagnostic::new(self.loc(v), "range endpoints must be single characters")),
                };
                if lo > hi {
                    return Err(Diagnostic::new(self.loc(v), format!("empty character range {lo:?}..{hi:?}")));
                }
                RegexExpr::CharRange(lo, hi)
            }
            "Eof" => RegexExpr::Eof,
            "Ref" => RegexExpr::Ref(self.text_of(n, "name")?),
            "Any" => RegexExpr::Wildcard,
            _ => self.regex(self.field(n, "e")?)?,
        })
    }

    fn lexer(&self, v: &Value) -> CResult<LexerSpec> {
        let n = self.node(v, "a lexer stanza")?;
        let mut main: Option<(String, Loc)> = None;
        let mut modes = Vec::new();
        for it in self.items(n, "items")? {
            let itn = self.node(it, "a lexer item")?;
            let loc = self.loc(it);
            if itn.is(&["LexItem", "Main"]) {
                if main.is_some() {
                    return Err(Diagnostic::new(loc, "duplicate `main` declaration in lexer stanza"));
                }
                main = Some((self.text_of(itn, "target")?, loc));
                continue;
            }
            let mut rules = Vec::new();
            for r in self.items(itn, "rules")? {
                let rn = self.node(r, "a lexer rule")?;
                let actions = self.items(rn, "acts")?.iter().map(|a| self.lex_action(a)).collect::<CResult<_>>()?;
                rules.push(LexerRule { pattern: self.regex(self.field(rn, "pat")?)?, actions, loc: self.loc(r) });
            }
            modes.push(LexerMode { name: self.text_of(itn, "name")?, rules, loc });
        }
        let (main_mode, main_loc) = match main {
            Some(m) => m,
            None => return Err(Diagnostic::new(self.loc(v), "lexer stanza has no `main` declaration")),
        };
        Ok(LexerSpec { main_mode, main_loc, modes })
    }

    fn lex_action(&self, v: &Value) -> CResult<LexerAction> {
        let n = self.node(v, "a lexer action")?;
        Ok(match n.ty.get(1).map_or("", String::as_str) {
            "Emit" => LexerAction::Emit,
            "Pass" => LexerAction::Pass,
            "Push" => LexerAction::Push(self.text_of(n, "target")?),
            "Pop" => LexerAction::Pop,
            "PopExtract" => LexerAction::PopExtract,
            _ => LexerAction::PopEmit(self.text_of(n, "tok")?),
        })
    }

    fn parser(&self, v: &Value) -> CResult<ParserSpec> {
        let n = self.node(v, "a parser stanza")?;
        let mut ps = ParserSpec::default();
        let mut seen_main = false;
        for it in self.items(n, "items")? {
            let itn = self.node(it, "a parser item")?;
            let loc = self.loc(it);
            match itn.ty.get(1).map_or("", String::as_str) {
                "Main" => {
                    if seen_main {
                        return Err(Diagnostic::new(loc, "duplicate `main` declaration in parser stanza"));
                    }
                    seen_main = true;
                    ps.main_loc = loc;
                    ps.main_nonterms = self.names(itn, "names")?;
                }
                "Prec" => {
                    for l in self.items(itn, "lines")? {
                        let ln = self.node(l, "a precedence line")?;
                        let rules = self.items(ln, "rules")?.iter().map(|p| self.path(p)).collect::<CResult<_>>()?;
                        let assoc = match self.opt(ln, "assoc")? {
                            None => None,
                            Some(a) => {
                                let an = self.node(self.field(self.node(a, "an associativity")?, "a")?, "an associativity")?;
                                Some(match an.ty.get(1).map_or("", String::as_str) {
                                    "Left" => Assoc::Left,
                                    "Right" => Assoc::Right,
                                    "Prefix" => Assoc::Prefix,
                                    _ => Assoc::Postfix,
                                })
                            }
                        };
                        ps.prec_lines.push(PrecLine { rules, assoc, loc: self.loc(l) });
                    }
                }
                "Attr" => {
                    for d in self.items(itn, "decls")? {
                        let dn = self.node(d, "an attribute declaration")?;
                        let rule = self.path(self.field(dn, "rule")?)?;
                        ps.attr_decls.push(AttrDecl { rule, attrs: self.names(dn, "names")?, loc: self.loc(d) });
                    }
                }
                "Prop" => {
                    for p in self.items(itn, "props")? {
                        ps.props.push(self.text_of(self.node(p, "a property")?, "name")?);
                    }
                }
                _ => {
                    let path = self.path(self.field(itn, "path")?)?;
                    let lhs_attrs = match self.opt(itn, "attrs")? {
                        Some(a) => self.names(self.node(a, "attributes")?, "names")?,
                        None => vec![],
                    };
                    let rhs = self.pexpr(self.field(itn, "rhs")?)?;
                    ps.rules.push(RuleDecl { path, lhs_attrs, rhs, loc });
                }
            }
        }
        if !seen_main {
            return Err(Diagnostic::new(self.loc(v), "parser stanza has no `main` declaration"));
        }
        Ok(ps)
    }

    fn pexpr(&self, v: &Value) -> CResult<ParseExpr> {
        let n = self.node(v, "a parse expression")?;
        let mut branches = Vec::new();
        for b in self.items(n, "branches")? {
            let bn = self.node(b, "a sequence")?;
            let mut items = self.items(bn, "items")?.iter().map(|i| self.pitem(i)).collect::<CResult<Vec<_>>>()?;
            branches.push(if items.len() == 1 { items.pop().unwrap() } else { ParseExpr::Seq(items) });
        }
        if branches.len() == 1 {
            return Ok(branches.pop().unwrap());
        }
        Ok(ParseExpr::AltBranches(branches.into_iter().map(split_label).collect()))
    }

    fn pitem(&self, v: &Value) -> CResult<ParseExpr> {
        let n = self.node(v, "a parse item")?;
        match n.ty.get(1).map_or("", String::as_str) {
            "Named" => Ok(ParseExpr::Named(self.text_of(n, "name")?, Box::new(self.pitem(self.field(n, "x")?)?))),
            "Unfold" => Ok(ParseExpr::Unfold(Box::new(self.pitem(self.field(n, "x")?)?))),
            _ => {
                let mut e = self.patom(self.field(n, "atom")?)?;
                for op in self.items(n, "ops")? {
                    let on = self.node(op, "a postfix operator")?;
                    e = match on.ty.get(1).map_or("", String::as_str) {
                        "Star" => ParseExpr::Star(Box::new(e)),
                        "Plus" => ParseExpr::Plus(Box::new(e)),
                        "Opt" => ParseExpr::Optional(Box::new(e)),
                        _ => {
                            let mut reqs = Vec::new();
                            let mut star = false;
                            for r in self.items(on, "reqs")? {
                                let rn = self.node(r, "an attribute requirement")?;
                                if rn.is(&["Req", "AnyPrec"]) {
                                    star = true;
                                } else {
                                    reqs.push(self.text_of(rn, "name")?);
                                }
                            }
                            add_attr_reqs(e, reqs, star).map_err(|m| Diagnostic::new(self.loc(op), m))?
                        }
                    };
                }
                Ok(e)
            }
        }
    }

    fn patom(&self, v: &Value) -> CResult<ParseExpr> {
        let n = self.node(v, "a parse atom")?;
        Ok(match n.ty.get(1).map_or("", String::as_str) {
            "Lit" => ParseExpr::TermLiteral(self.string(self.field(n, "s")?)?),
            "Eps" => ParseExpr::Eps,
            "Ref" => ParseExpr::nonterm(&self.text_of(n, "name")?),
            "Space" => ParseExpr::SpaceShorthand,
            "Group" => self.pexpr(self.field(n, "e")?)?,
            "Pass" => ParseExpr::PassString(self.string(self.field(n, "s")?)?),
            "Single" => singleton_alt(self.pexpr(self.field(n, "e")?)?).map_err(|m| Diagnostic::new(self.loc(v), m))?,
            _ => {
                let flavor = match self.node(self.field(n, "flavor")?, "a list flavor")?.ty.get(1).map_or("", String::as_str) {
                    "L" => ListFlavor::L,
                    "B" => ListFlavor::B,
                    "B2" => ListFlavor::B2,
                    "T" => ListFlavor::T,
                    _ => ListFlavor::T2,
                };
                let min = match self.node(self.field(n, "min")?, "a list bound")?.ty.get(1).map_or("", String::as_str) {
                    "Zero" => 0,
                    "One" => 1,
                    _ => 2,
                };
                let trailing = match self.opt(n, "trail")? {
                    None => Trailing::None,
                    Some(t) if self.node(t, "a trailing marker")?.is(&["Trail", "Optional"]) => Trailing::Optional,
                    Some(_) => Trailing::Required,
                };
                ParseExpr::ListExpr {
                    flavor,
                    elem: Box::new(self.pexpr(self.field(n, "elem")?)?),
                    min,
                    delim: Box::new(self.pexpr(self.field(n, "delim")?)?),
                    trailing,
                }
            }
        })
    }
}
