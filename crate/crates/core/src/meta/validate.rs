use std::collections::{BTreeMap, BTreeSet};

use super::spec::*;
use super::Diagnostic;

pub const KNOWN_PROPS: &[&str] = &["name_strict"];

/// Checks every cross-reference and acyclicity invariant of a parsed spec.
/// An empty result means the spec is valid.
pub fn validate_spec(spec: &LangSpec) -> Vec<Diagnostic> {
    let mut v = Validator { spec, diags: Vec::new() };
    v.tokens();
    v.lexer();
    v.parser();
    for t in &spec.compile_tests {
        if t.k == 0 {
            v.push(t.loc, "LR(k) tests require k >= 1");
        }
    }
    v.diags
}

struct Validator<'a> {
    spec: &'a LangSpec,
    diags: Vec<Diagnostic>,
}

impl<'a> Validator<'a> {
    fn push(&mut self, loc: Loc, msg: impl Into<String>) {
        self.diags.push(Diagnostic::new(loc, msg));
    }

    fn tokens(&mut self) {
        let spec = self.spec;
        let mut seen = BTreeSet::new();
        for t in &spec.token_decls {
            if !seen.insert(t.name.as_str()) {
                self.push(t.loc, format!("duplicate token `{}`", t.name));
            }
            if t.name == "eof" {
                self.push(t.loc, "`eof` is reserved");
            }
        }
        for t in &spec.token_decls {
            let mut missing = Vec::new();
            t.pattern.for_each_ref(&mut |r| {
                if spec.token(r).is_none() {
                    missing.push(r.to_string());
                }
            });
            for r in missing {
                self.push(t.loc, format!("token `{}` references undeclared token `{r}`", t.name));
            }
        }
        if let Some((decl, cycle)) = self.find_alias_cycle() {
            self.push(decl.loc, format!("cyclic alias reference: {}", cycle.join(" -> ")));
            return;
        }
        for t in &spec.token_decls {
            let at_top = t.kind == TokenKind::Alias;
            let mut errs = Vec::new();
            self.check_token_positions(&t.pattern, at_top, &mut errs);
            for e in errs {
                self.push(t.loc, format!("in token `{}`: {e}", t.name));
            }
        }
    }

    fn find_alias_cycle(&self) -> Option<(&'a TokenDecl, Vec<String>)> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        fn visit<'a>(
            spec: &'a LangSpec,
            name: &str,
            marks: &mut BTreeMap<String, Mark>,
            stack: &mut Vec<String>,
        ) -> Option<Vec<String>> {
            match marks.get(name) {
                Some(Mark::Done) => return None,
                Some(Mark::Active) => {
                    let start = stack.iter().position(|s| s == name).unwrap_or(0);
                    let mut cyc = stack[start..].to_vec();
                    cyc.push(name.to_string());
                    return Some(cyc);
                }
                None => {}
            }
            let decl = spec.token(name)?;
            marks.insert(name.to_string(), Mark::Active);
            stack.push(name.to_string());
            let mut refs = Vec::new();
            decl.pattern.for_each_ref(&mut |r| refs.push(r.to_string()));
            for r in refs {
                if let Some(c) = visit(spec, &r, marks, stack) {
                    return Some(c);
                }
            }
            stack.pop();
            marks.insert(name.to_string(), Mark::Done);
            None
        }
        let mut marks = BTreeMap::new();
        for t in &self.spec.token_decls {
            let mut stack = Vec::new();
            if let Some(c) = visit(self.spec, &t.name, &mut marks, &mut stack) {
                return Some((t, c));
            }
        }
        None
    }

    /// Opaque tokens (and aliases that name opaque tokens) may only appear as
    /// whole alternatives at the top of an alias or lexer rule pattern.
    fn check_token_positions(&self, e: &RegexExpr, emit_pos: bool, errs: &mut Vec<String>) {
        match e {
            RegexExpr::Ref(r) => {
                if emit_pos {
                    return;
                }
                match self.spec.token(r) {
                    Some(t) if t.kind == TokenKind::Opaque => {
                        errs.push(format!("opaque token `{r}` cannot be used inside a token pattern"));
                    }
                    Some(_) if self.names_opaque(r) => {
                        errs.push(format!("alias `{r}` names opaque tokens and cannot be nested in a pattern"));
                    }
                    _ => {}
                }
            }
            RegexExpr::Alt(xs) => xs.iter().for_each(|x| self.check_token_positions(x, emit_pos, errs)),
            RegexExpr::Concat(xs) => xs.iter().for_each(|x| self.check_token_positions(x, false, errs)),
            RegexExpr::Star(x) | RegexExpr::Plus(x) | RegexExpr::Optional(x) => {
                self.check_token_positions(x, false, errs)
            }
            RegexExpr::Literal(_) | RegexExpr::CharRange(..) | RegexExpr::Wildcard | RegexExpr::Eof => {}
        }
    }

    fn names_opaque(&self, alias: &str) -> bool {
        fn go(spec: &LangSpec, e: &RegexExpr, depth: usize) -> bool {
            if depth > spec.token_decls.len() {
                return false;
            }
            match e {
                RegexExpr::Ref(r) => match spec.token(r) {
                    Some(t) if t.kind == TokenKind::Opaque => true,
                    Some(t) => go(spec, &t.pattern, depth + 1),
                    None => false,
                },
                RegexExpr::Alt(xs) => xs.iter().any(|x| go(spec, x, depth)),
                _ => false,
            }
        }
        self.spec.token(alias).map(|t| go(self.spec, &t.pattern, 0)).unwrap_or(false)
    }

    fn lexer(&mut self) {
        let spec = self.spec;
        let lx = &spec.lexer;
        let mut names = BTreeSet::new();
        for m in &lx.modes {
            if !names.insert(m.name.as_str()) {
                self.push(m.loc, format!("duplicate lexer mode `{}`", m.name));
            }
        }
        if lx.mode(&lx.main_mode).is_none() {
            self.push(lx.main_loc, format!("main mode `{}` is not declared", lx.main_mode));
        }
        for m in &lx.modes {
            for r in &m.rules {
                let mut missing = Vec::new();
                r.pattern.for_each_ref(&mut |n| {
                    if spec.token(n).is_none() {
                        missing.push(n.to_string());
                    }
                });
                for n in missing {
                    self.push(r.loc, format!("lexer rule references undeclared token `{n}`"));
                }
                let mut errs = Vec::new();
                self.check_token_positions(&r.pattern, true, &mut errs);
                for e in errs {
                    self.push(r.loc, e);
                }
                if r.actions.is_empty() {
                    self.push(r.loc, "lexer rule has an empty action list");
                }
                for a in &r.actions {
                    match a {
                        LexerAction::Push(target) if lx.mode(target).is_none() => {
                            self.push(r.loc, format!("push target `{target}` is not a declared mode"));
                        }
                        LexerAction::PopEmit(tok) if !spec.is_opaque_token(tok) => {
                            self.push(r.loc, format!("pop_emit target `{tok}` is not an opaque token"));
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    fn parser(&mut self) {
        let spec = self.spec;
        let ps = &spec.parser;
        let nonterms: BTreeSet<&str> = ps.rules.iter().map(|r| r.nonterm()).collect();
        for nt in &nonterms {
            if spec.token(nt).is_some() {
                let loc = ps.rules.iter().find(|r| r.nonterm() == *nt).unwrap().loc;
                self.push(loc, format!("`{nt}` is declared both as a token and a nonterminal"));
            }
        }
        if ps.main_nonterms.is_empty() {
            self.push(ps.main_loc, "parser `main` lists no nonterminals");
        }
        for m in &ps.main_nonterms {
            if !nonterms.contains(m.as_str()) {
                self.push(ps.main_loc, format!("main nonterminal `{m}` has no rules"));
            }
        }
        for p in &ps.props {
            if !KNOWN_PROPS.contains(&p.as_str()) {
                self.push(ps.main_loc, format!("unknown prop `{p}`"));
            }
        }

        let mut paths: BTreeMap<&str, Vec<&RuleDecl>> = BTreeMap::new();
        for r in &ps.rules {
            paths.entry(r.nonterm()).or_default().push(r);
        }
        for rules in paths.values() {
            for (i, a) in rules.iter().enumerate() {
                for b in &rules[..i] {
                    if a.path == b.path {
                        self.push(a.loc, format!("duplicate variant `{}`", a.dotted()));
                    } else if a.path.starts_with(&b.path) || b.path.starts_with(&a.path) {
                        self.push(
                            a.loc,
                            format!("`{}` and `{}` overlap: a variant cannot also be a variant group", a.dotted(), b.dotted()),
                        );
                    }
                }
            }
        }

        for r in &ps.rules {
            let mut errs = Vec::new();
            self.check_parse_expr(&r.rhs, &nonterms, &mut errs);
            for e in errs {
                self.push(r.loc, format!("in rule `{}`: {e}", r.dotted()));
            }
        }

        let declared: BTreeSet<&[String]> = ps.rules.iter().map(|r| r.path.as_slice()).collect();
        let mut in_prec = BTreeSet::new();
        for line in &ps.prec_lines {
            let mut lhs = BTreeSet::new();
            for path in &line.rules {
                if !declared.contains(path.as_slice()) {
                    self.push(line.loc, format!("precedence line names undeclared rule `{}`", path.join(".")));
                }
                if !in_prec.insert(path.clone()) {
                    self.push(line.loc, format!("rule `{}` appears in more than one precedence line", path.join(".")));
                }
                lhs.insert(path[0].as_str());
            }
            if lhs.len() > 1 {
                self.push(
                    line.loc,
                    format!(
                        "precedence line mixes nonterminals {}",
                        lhs.iter().map(|s| format!("`{s}`")).collect::<Vec<_>>().join(", ")
                    ),
                );
            }
        }
        for a in &ps.attr_decls {
            if !declared.contains(a.rule.as_slice()) {
                self.push(a.loc, format!("attr declaration names undeclared rule `{}`", a.rule.join(".")));
            }
        }
    }

    fn check_parse_expr(&self, e: &ParseExpr, nonterms: &BTreeSet<&str>, errs: &mut Vec<String>) {
        match e {
            ParseExpr::NontermRef { name, .. } => {
                if nonterms.contains(name.as_str()) {
                    return;
                }
                match self.spec.token(name) {
                    Some(t) if t.kind == TokenKind::Alias => {
                        errs.push(format!("alias token `{name}` is never emitted and cannot appear in a rule"))
                    }
                    _ => errs.push(format!("reference to undeclared rule or token `{name}`")),
                }
            }
            ParseExpr::Unfold(x) => {
                if !matches!(**x, ParseExpr::NontermRef { .. }) {
                    errs.push("`~` applies only to nonterminal references".into());
                }
                self.check_parse_expr(x, nonterms, errs);
            }
            ParseExpr::Named(_, x)
            | ParseExpr::SingletonAlt(_, x)
            | ParseExpr::Star(x)
            | ParseExpr::Plus(x)
            | ParseExpr::Optional(x) => self.check_parse_expr(x, nonterms, errs),
            ParseExpr::Seq(xs) => xs.iter().for_each(|x| self.check_parse_expr(x, nonterms, errs)),
            ParseExpr::AltBranches(bs) => bs.iter().for_each(|(_, x)| self.check_parse_expr(x, nonterms, errs)),
            ParseExpr::ListExpr { elem, delim, min, .. } => {
                if *min > 2 {
                    errs.push("list minimum must be 0, 1 or 2".into());
                }
                self.check_parse_expr(elem, nonterms, errs);
                self.check_parse_expr(delim, nonterms, errs);
            }
            ParseExpr::TermLiteral(s) if s.is_empty() => errs.push("empty literal".into()),
            ParseExpr::TermLiteral(_)
            | ParseExpr::TokenRef(_)
            | ParseExpr::PassString(_)
            | ParseExpr::SpaceShorthand
            | ParseExpr::Eps => {}
        }
    }
}
