//! Hand-written recursive-descent parser for `.lang` sources.
//!
//! This is the bootstrap frontend; the dialect it accepts is documented in
//! `docs/metalang.md` and mirrored by `fixtures/meta.lang`.

use super::lex::{tokenize, Spanned, Tok};
use super::spec::*;
use super::Diagnostic;

type PResult<T> = Result<T, Diagnostic>;

/// Parses the concrete syntax only; cross references are checked by
/// [`super::validate_spec`].
pub fn parse_syntax(src: &str) -> PResult<LangSpec> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let spec = p.spec()?;
    Ok(spec)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn loc(&self) -> Loc {
        self.toks[self.pos].loc
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(Diagnostic::new(self.loc(), msg))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Str(_) => "string literal".into(),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`, found {}", self.describe()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.err(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.err(format!("expected backtick literal, found {}", self.describe())),
        }
    }

    fn path(&mut self) -> PResult<Vec<String>> {
        let mut path = vec![self.ident()?];
        while self.eat_punct(".") {
            path.push(self.ident()?);
        }
        Ok(path)
    }

    fn spec(&mut self) -> PResult<LangSpec> {
        self.expect_kw("tokens")?;
        self.expect_punct("{")?;
        let mut token_decls = Vec::new();
        while !self.is_punct("}") {
            token_decls.push(self.token_decl()?);
        }
        self.expect_punct("}")?;
        let lexer = self.lexer_stanza()?;
        let parser = self.parser_stanza()?;
        let mut compile_tests = Vec::new();
        if self.is_kw("compile_test") {
            self.bump();
            self.expect_punct("{")?;
            while !self.is_punct("}") {
                compile_tests.push(self.lr_test()?);
            }
            self.expect_punct("}")?;
        }
        let mut parse_tests = Vec::new();
        if self.is_kw("test") {
            self.bump();
            self.expect_punct("{")?;
            while !self.is_punct("}") {
                let loc = self.loc();
                let raw = self.string()?;
                let skip_roundtrip = self.eat_punct("<<>>");
                self.expect_punct(";")?;
                let (input, expected_fail_offset) = strip_fail_marker(&raw);
                parse_tests.push(ParseTestDecl { input, expected_fail_offset, skip_roundtrip, loc });
            }
            self.expect_punct("}")?;
        }
        if *self.peek() != Tok::Eof {
            return self.err(format!("expected end of input, found {}", self.describe()));
        }
        Ok(LangSpec { token_decls, lexer, parser, compile_tests, parse_tests })
    }

    fn lr_test(&mut self) -> PResult<LrTestDecl> {
        let loc = self.loc();
        let expect_success = !self.eat_punct("!");
        self.expect_kw("LR")?;
        self.expect_punct("(")?;
        let k = match self.bump() {
            Tok::Int(n) => n as usize,
            _ => return Err(Diagnostic::new(loc, "expected lookahead count in LR(k)")),
        };
        self.expect_punct(")")?;
        self.expect_punct(";")?;
        Ok(LrTestDecl { k, expect_success, loc })
    }

    fn token_decl(&mut self) -> PResult<TokenDecl> {
        let loc = self.loc();
        let name = self.ident()?;
        let kind = if self.eat_punct("<-") {
            TokenKind::Opaque
        } else if self.eat_punct("<=") {
            TokenKind::Alias
        } else {
            return self.err(format!("expected `<-` or `<=`, found {}", self.describe()));
        };
        let pattern = self.regex()?;
        self.expect_punct(";")?;
        Ok(TokenDecl { name, kind, pattern, loc })
    }

    fn regex(&mut self) -> PResult<RegexExpr> {
        let mut alts = vec![self.regex_seq()?];
        while self.eat_punct("|") {
            alts.push(self.regex_seq()?);
        }
        Ok(if alts.len() == 1 { alts.pop().unwrap() } else { RegexExpr::Alt(alts) })
    }

    fn regex_starts(&self) -> bool {
        matches!(self.peek(), Tok::Str(_) | Tok::Ident(_)) || self.is_punct("(") || self.is_punct("_")
    }

    fn regex_seq(&mut self) -> PResult<RegexExpr> {
        let mut items = Vec::new();
        while self.regex_starts() {
            items.push(self.regex_post()?);
        }
        match items.len() {
            0 => self.err(format!("expected token pattern, found {}", self.describe())),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(RegexExpr::Concat(items)),
        }
    }

    fn regex_post(&mut self) -> PResult<RegexExpr> {
        let mut e = self.regex_atom()?;
        loop {
            if self.eat_punct("*") {
                e = RegexExpr::Star(Box::new(e));
            } else if self.eat_punct("+") {
                e = RegexExpr::Plus(Box::new(e));
            } else if self.eat_punct("?") {
                e = RegexExpr::Optional(Box::new(e));
            } else {
                return Ok(e);
            }
        }
    }

    fn regex_atom(&mut self) -> PResult<RegexExpr> {
        let loc = self.loc();
        match self.bump() {
            Tok::Str(s) => {
                if self.eat_punct("..") {
                    let hi = self.string()?;
                    let (lo, hi) = match (single_char(&s), single_char(&hi)) {
                        (Some(a), Some(b)) => (a, b),
                        _ => return Err(Diagnostic::new(loc, "range endpoints must be single characters")),
                    };
                    if lo > hi {
                        return Err(Diagnostic::new(loc, format!("empty character range {lo:?}..{hi:?}")));
                    }
                    Ok(RegexExpr::CharRange(lo, hi))
                } else {
                    Ok(RegexExpr::Literal(s))
                }
            }
            Tok::Ident(s) if s == "eof" => Ok(RegexExpr::Eof),
            Tok::Ident(s) => Ok(RegexExpr::Ref(s)),
            Tok::Punct("_") => Ok(RegexExpr::Wildcard),
            Tok::Punct("(") => {
                let e = self.regex()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            _ => Err(Diagnostic::new(loc, "expected token pattern")),
        }
    }

    fn lexer_stanza(&mut self) -> PResult<LexerSpec> {
        self.expect_kw("lexer")?;
        self.expect_punct("{")?;
        let mut main: Option<(String, Loc)> = None;
        let mut modes = Vec::new();
        while !self.is_punct("}") {
            let loc = self.loc();
            if self.is_kw("main") {
                self.bump();
                self.expect_punct("{")?;
                let name = self.ident()?;
                self.expect_punct("}")?;
                if main.is_some() {
                    return Err(Diagnostic::new(loc, "duplicate `main` declaration in lexer stanza"));
                }
                main = Some((name, loc));
            } else if self.is_kw("mode") {
                self.bump();
                let name = self.ident()?;
                self.expect_punct("{")?;
                let mut rules = Vec::new();
                while !self.is_punct("}") {
                    rules.push(self.lexer_rule()?);
                }
                self.expect_punct("}")?;
                modes.push(LexerMode { name, rules, loc });
            } else {
                return self.err(format!("expected `main` or `mode`, found {}", self.describe()));
            }
        }
        self.expect_punct("}")?;
        let (main_mode, main_loc) = match main {
            Some(m) => m,
            None => return self.err("lexer stanza has no `main` declaration"),
        };
        Ok(LexerSpec { main_mode, main_loc, modes })
    }

    fn lexer_rule(&mut self) -> PResult<LexerRule> {
        let loc = self.loc();
        let pattern = self.regex()?;
        self.expect_punct("=>")?;
        self.expect_punct("{")?;
        let mut actions = Vec::new();
        while !self.is_punct("}") {
            let word = self.ident()?;
            let action = match word.as_str() {
                "emit" => LexerAction::Emit,
                "pass" => LexerAction::Pass,
                "push" => LexerAction::Push(self.ident()?),
                "pop" => LexerAction::Pop,
                "pop_extract" => LexerAction::PopExtract,
                "pop_emit" => LexerAction::PopEmit(self.ident()?),
                other => return self.err(format!("unknown lexer action `{other}`")),
            };
            self.expect_punct(";")?;
            actions.push(action);
        }
        self.expect_punct("}")?;
        if actions.is_empty() {
            return Err(Diagnostic::new(loc, "lexer rule has an empty action list"));
        }
        Ok(LexerRule { pattern, actions, loc })
    }

    fn parser_stanza(&mut self) -> PResult<ParserSpec> {
        self.expect_kw("parser")?;
        self.expect_punct("{")?;
        let mut ps = ParserSpec::default();
        let mut seen_main = false;
        while !self.is_punct("}") {
            let loc = self.loc();
            let directive = matches!(self.peek_at(1), Tok::Punct("{"));
            if directive && self.is_kw("main") {
                self.bump();
                self.bump();
                if seen_main {
                    return Err(Diagnostic::new(loc, "duplicate `main` declaration in parser stanza"));
                }
                seen_main = true;
                ps.main_loc = loc;
                ps.main_nonterms.push(self.ident()?);
                while self.eat_punct(",") {
                    ps.main_nonterms.push(self.ident()?);
                }
                self.expect_punct("}")?;
            } else if directive && self.is_kw("prec") {
                self.bump();
                self.bump();
                while !self.is_punct("}") {
                    let loc = self.loc();
                    let mut rules = Vec::new();
                    let mut assoc = None;
                    loop {
                        if let Tok::Ident(s) = self.peek() {
                            if let Some(a) = Assoc::from_keyword(s) {
                                assoc = Some(a);
                                self.bump();
                                break;
                            }
                            rules.push(self.path()?);
                        } else {
                            break;
                        }
                    }
                    if rules.is_empty() {
                        return Err(Diagnostic::new(loc, "empty precedence line"));
                    }
                    self.expect_punct(";")?;
                    ps.prec_lines.push(PrecLine { rules, assoc, loc });
                }
                self.expect_punct("}")?;
            } else if directive && self.is_kw("attr") {
                self.bump();
                self.bump();
                while !self.is_punct("}") {
                    let loc = self.loc();
                    let rule = self.path()?;
                    self.expect_punct("->")?;
                    let mut attrs = vec![self.ident()?];
                    while self.eat_punct(",") {
                        attrs.push(self.ident()?);
                    }
                    self.expect_punct(";")?;
                    ps.attr_decls.push(AttrDecl { rule, attrs, loc });
                }
                self.expect_punct("}")?;
            } else if directive && self.is_kw("prop") {
                self.bump();
                self.bump();
                while !self.is_punct("}") {
                    ps.props.push(self.ident()?);
                    self.expect_punct(";")?;
                }
                self.expect_punct("}")?;
            } else {
                ps.rules.push(self.rule()?);
            }
        }
        self.expect_punct("}")?;
        if !seen_main {
            return self.err("parser stanza has no `main` declaration");
        }
        Ok(ps)
    }

    fn rule(&mut self) -> PResult<RuleDecl> {
        let loc = self.loc();
        let path = self.path()?;
        let mut lhs_attrs = Vec::new();
        if self.eat_punct("[") {
            lhs_attrs.push(self.ident()?);
            while self.eat_punct(",") {
                lhs_attrs.push(self.ident()?);
            }
            self.expect_punct("]")?;
        }
        self.expect_punct("<-")?;
        let rhs = self.pexpr()?;
        self.expect_punct(";")?;
        Ok(RuleDecl { path, lhs_attrs, rhs, loc })
    }

    fn pexpr(&mut self) -> PResult<ParseExpr> {
        let mut branches = vec![self.pseq()?];
        while self.eat_punct("|") {
            branches.push(self.pseq()?);
        }
        if branches.len() == 1 {
            return Ok(branches.pop().unwrap());
        }
        Ok(ParseExpr::AltBranches(branches.into_iter().map(split_label).collect()))
    }

    fn pexpr_starts(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) | Tok::Str(_) => true,
            Tok::Punct(p) => matches!(*p, "(" | "_" | "@" | "~" | "#Alt" | "#L" | "#B" | "#B2" | "#T" | "#T2"),
            _ => false,
        }
    }

    fn pseq(&mut self) -> PResult<ParseExpr> {
        let mut items = Vec::new();
        while self.pexpr_starts() {
            items.push(self.pprefix()?);
        }
        match items.len() {
            0 => self.err(format!("expected parse expression, found {}", self.describe())),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(ParseExpr::Seq(items)),
        }
    }

    fn pprefix(&mut self) -> PResult<ParseExpr> {
        if let Tok::Ident(name) = self.peek() {
            if matches!(self.peek_at(1), Tok::Punct(":")) {
                let name = name.clone();
                self.bump();
                self.bump();
                let inner = self.pprefix()?;
                return Ok(ParseExpr::Named(name, Box::new(inner)));
            }
        }
        if self.eat_punct("~") {
            let inner = self.pprefix()?;
            return Ok(ParseExpr::Unfold(Box::new(inner)));
        }
        self.ppostfix()
    }

    fn ppostfix(&mut self) -> PResult<ParseExpr> {
        let mut e = self.patom()?;
        loop {
            let loc = self.loc();
            if self.eat_punct("*") {
                e = ParseExpr::Star(Box::new(e));
            } else if self.eat_punct("+") {
                e = ParseExpr::Plus(Box::new(e));
            } else if self.eat_punct("?") {
                e = ParseExpr::Optional(Box::new(e));
            } else if self.eat_punct("[") {
                let mut reqs = Vec::new();
                let mut star = false;
                loop {
                    if self.is_kw("pr") && matches!(self.peek_at(1), Tok::Punct("=")) {
                        self.bump();
                        self.bump();
                        self.expect_punct("*")?;
                        star = true;
                    } else {
                        reqs.push(self.ident()?);
                    }
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct("]")?;
                e = add_attr_reqs(e, reqs, star).map_err(|m| Diagnostic::new(loc, m))?;
            } else {
                return Ok(e);
            }
        }
    }

    fn patom(&mut self) -> PResult<ParseExpr> {
        let loc = self.loc();
        match self.bump() {
            Tok::Str(s) => Ok(ParseExpr::TermLiteral(s)),
            Tok::Ident(s) if s == "eps" => Ok(ParseExpr::Eps),
            Tok::Ident(s) => Ok(ParseExpr::nonterm(&s)),
            Tok::Punct("_") => Ok(ParseExpr::SpaceShorthand),
            Tok::Punct("(") => {
                let e = self.pexpr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Punct("@") => {
                self.expect_punct("(")?;
                let s = self.string()?;
                self.expect_punct(")")?;
                Ok(ParseExpr::PassString(s))
            }
            Tok::Punct("#Alt") => {
                self.expect_punct("[")?;
                let e = self.pexpr()?;
                self.expect_punct("]")?;
                singleton_alt(e).map_err(|m| Diagnostic::new(loc, m))
            }
            Tok::Punct(p) if ListFlavor::from_keyword(p).is_some() => {
                let flavor = ListFlavor::from_keyword(p).unwrap();
                self.expect_punct("[")?;
                let elem = self.pexpr()?;
                let min = match self.bump() {
                    Tok::Punct("::") => 0,
                    Tok::Punct("::+") => 1,
                    Tok::Punct("::++") => 2,
                    _ => return Err(Diagnostic::new(loc, "expected `::`, `::+` or `::++` in list expression")),
                };
                let delim = self.pexpr()?;
                let trailing = if self.eat_punct(":?") {
                    Trailing::Optional
                } else if self.eat_punct("::") {
                    Trailing::Required
                } else {
                    Trailing::None
                };
                self.expect_punct("]")?;
                Ok(ParseExpr::ListExpr {
                    flavor,
                    elem: Box::new(elem),
                    min,
                    delim: Box::new(delim),
                    trailing,
                })
            }
            _ => Err(Diagnostic::new(loc, "expected parse expression")),
        }
    }
}

pub(crate) fn single_char(s: &str) -> Option<char> {
    let mut it = s.chars();
    let c = it.next()?;
    it.next().is_none().then_some(c)
}

/// An alternation branch written `L: e` carries the label `L`.
pub(crate) fn split_label(e: ParseExpr) -> (Option<String>, ParseExpr) {
    match e {
        ParseExpr::Named(l, inner) => (Some(l), *inner),
        e => (None, e),
    }
}

pub(crate) fn singleton_alt(e: ParseExpr) -> Result<ParseExpr, String> {
    if matches!(e, ParseExpr::AltBranches(_)) {
        return Err("#Alt[...] takes exactly one branch".into());
    }
    let (label, inner) = split_label(e);
    Ok(ParseExpr::SingletonAlt(label, Box::new(inner)))
}

pub(crate) fn add_attr_reqs(e: ParseExpr, reqs: Vec<String>, star: bool) -> Result<ParseExpr, String> {
    match e {
        ParseExpr::NontermRef { name, mut attrs, prec_any } => {
            attrs.extend(reqs);
            Ok(ParseExpr::NontermRef { name, attrs, prec_any: prec_any || star })
        }
        _ => Err("attribute requirements apply only to nonterminal references".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "tokens { id <- `a`; top <= id; } \
        lexer { main { m } mode m { top => { emit; } eof => { pop; } } } \
        parser { main { S } S <- x:id; }";

    #[test]
    fn parses_minimal_spec() {
        let s = parse_syntax(MINI).unwrap();
        assert_eq!(s.token_decls.len(), 2);
        assert_eq!(s.lexer.main_mode, "m");
        assert_eq!(s.parser.rules[0].path, vec!["S"]);
    }

    #[test]
    fn parses_mixed_rhs() {
        let src = MINI.replace(
            "S <- x:id;",
            "S.A <- x:E[I] _ `=` _ y:E; E.B <- op:(Add:`+` | Sub:`-`) z:#L[E::+`,`_:?] w:~E[pr=*]*;",
        );
        let s = parse_syntax(&src).unwrap();
        let b = &s.parser.rules[1].rhs;
        let ParseExpr::Seq(items) = b else { panic!("{b:?}") };
        let ParseExpr::Named(_, op) = &items[0] else { panic!() };
        assert_eq!(
            **op,
            ParseExpr::AltBranches(vec![
                (Some("Add".into()), ParseExpr::TermLiteral("+".into())),
                (Some("Sub".into()), ParseExpr::TermLiteral("-".into())),
            ])
        );
        let ParseExpr::Named(_, list) = &items[1] else { panic!() };
        assert!(matches!(**list, ParseExpr::ListExpr { min: 1, trailing: Trailing::Optional, .. }));
        let ParseExpr::Named(_, w) = &items[2] else { panic!() };
        let ParseExpr::Unfold(star) = &**w else { panic!("{w:?}") };
        assert!(matches!(**star, ParseExpr::Star(_)));
    }

    #[test]
    fn syntax_error_has_location() {
        let err = parse_syntax("tokens {\n  a <- ;\n}").unwrap_err();
        assert_eq!((err.loc.line, err.loc.col), (2, 8));
    }
}
