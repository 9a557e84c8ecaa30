//! Canonical `.lang` rendering of a [`LangSpec`]. Parsing the output yields
//! a structurally equal spec.

use std::fmt::Write;

use super::lex::escape;
use super::spec::*;

pub fn render_lang_spec(spec: &LangSpec) -> String {
    let mut out = String::new();
    out.push_str("tokens {\n");
    for t in &spec.token_decls {
        let arrow = match t.kind {
            TokenKind::Opaque => "<-",
            TokenKind::Alias => "<=",
        };
        let _ = writeln!(out, "    {} {} {};", t.name, arrow, render_regex(&t.pattern));
    }
    out.push_str("}\n\nlexer {\n");
    let _ = writeln!(out, "    main {{ {} }}", spec.lexer.main_mode);
    for m in &spec.lexer.modes {
        let _ = writeln!(out, "\n    mode {} {{", m.name);
        for r in &m.rules {
            let acts: Vec<String> = r.actions.iter().map(render_action).collect();
            let _ = writeln!(out, "        {} => {{ {} }}", render_regex(&r.pattern), acts.join(" "));
        }
        out.push_str("    }\n");
    }
    out.push_str("}\n\nparser {\n");
    let _ = writeln!(out, "    main {{ {} }}", spec.parser.main_nonterms.join(", "));
    if !spec.parser.prec_lines.is_empty() {
        out.push_str("    prec {\n");
        for l in &spec.parser.prec_lines {
            let mut parts: Vec<String> = l.rules.iter().map(|p| p.join(".")).collect();
            if let Some(a) = l.assoc {
                parts.push(a.keyword().to_string());
            }
            let _ = writeln!(out, "        {};", parts.join(" "));
        }
        out.push_str("    }\n");
    }
    if !spec.parser.attr_decls.is_empty() {
        out.push_str("    attr {\n");
        for a in &spec.parser.attr_decls {
            let _ = writeln!(out, "        {} -> {};", a.rule.join("."), a.attrs.join(", "));
        }
        out.push_str("    }\n");
    }
    if !spec.parser.props.is_empty() {
        let props: Vec<String> = spec.parser.props.iter().map(|p| format!("{p};")).collect();
        let _ = writeln!(out, "    prop {{ {} }}", props.join(" "));
    }
    out.push('\n');
    for r in &spec.parser.rules {
        let attrs = if r.lhs_attrs.is_empty() { String::new() } else { format!("[{}]", r.lhs_attrs.join(", ")) };
        let _ = writeln!(out, "    {}{} <- {};", r.dotted(), attrs, render_parse_expr(&r.rhs));
    }
    out.push_str("}\n");
    if !spec.compile_tests.is_empty() {
        out.push_str("\ncompile_test {\n");
        for t in &spec.compile_tests {
            let bang = if t.expect_success { "" } else { "!" };
            let _ = writeln!(out, "    {bang}LR({});", t.k);
        }
        out.push_str("}\n");
    }
    if !spec.parse_tests.is_empty() {
        out.push_str("\ntest {\n");
        for t in &spec.parse_tests {
            let mut s = t.input.clone();
            if let Some(off) = t.expected_fail_offset {
                s.insert_str(off, "##");
            }
            let skip = if t.skip_roundtrip { " <<>>" } else { "" };
            let _ = writeln!(out, "    `{}`{};", escape(&s), skip);
        }
        out.push_str("}\n");
    }
    out
}

fn render_action(a: &LexerAction) -> String {
    match a {
        LexerAction::Emit => "emit;".into(),
        LexerAction::Pass => "pass;".into(),
        LexerAction::Push(m) => format!("push {m};"),
        LexerAction::Pop => "pop;".into(),
        LexerAction::PopExtract => "pop_extract;".into(),
        LexerAction::PopEmit(t) => format!("pop_emit {t};"),
    }
}

fn regex_level(e: &RegexExpr) -> u8 {
    match e {
        RegexExpr::Alt(_) => 0,
        RegexExpr::Concat(_) => 1,
        RegexExpr::Star(_) | RegexExpr::Plus(_) | RegexExpr::Optional(_) => 2,
        _ => 3,
    }
}

pub fn render_regex(e: &RegexExpr) -> String {
    render_regex_at(e, 0)
}

fn render_regex_at(e: &RegexExpr, min: u8) -> String {
    let s = match e {
        RegexExpr::Literal(s) => format!("`{}`", escape(s)),
        RegexExpr::CharRange(a, b) => format!("`{}`..`{}`", escape(&a.to_string()), escape(&b.to_string())),
        RegexExpr::Concat(xs) => xs.iter().map(|x| render_regex_at(x, 2)).collect::<Vec<_>>().join(" "),
        RegexExpr::Alt(xs) => xs.iter().map(|x| render_regex_at(x, 1)).collect::<Vec<_>>().join(" | "),
        RegexExpr::Star(x) => format!("{}*", render_regex_at(x, 3)),
        RegexExpr::Plus(x) => format!("{}+", render_regex_at(x, 3)),
        RegexExpr::Optional(x) => format!("{}?", render_regex_at(x, 3)),
        RegexExpr::Ref(n) => n.clone(),
        RegexExpr::Wildcard => "_".into(),
        RegexExpr::Eof => "eof".into(),
    };
    if regex_level(e) < min {
        format!("({s})")
    } else {
        s
    }
}

fn expr_level(e: &ParseExpr) -> u8 {
    match e {
        ParseExpr::AltBranches(_) => 0,
        ParseExpr::Seq(_) => 1,
        ParseExpr::Named(..) | ParseExpr::Unfold(_) => 2,
        ParseExpr::Star(_) | ParseExpr::Plus(_) | ParseExpr::Optional(_) => 3,
        ParseExpr::NontermRef { attrs, prec_any, .. } if !attrs.is_empty() || *prec_any => 3,
        _ => 4,
    }
}

pub fn render_parse_expr(e: &ParseExpr) -> String {
    render_pe(e, 0)
}

fn labeled(label: &Option<String>, inner: &ParseExpr) -> String {
    match label {
        Some(l) => format!("{l}:{}", render_pe(inner, 2)),
        None => render_pe(inner, 1),
    }
}

fn render_pe(e: &ParseExpr, min: u8) -> String {
    let s = match e {
        ParseExpr::TermLiteral(s) => format!("`{}`", escape(s)),
        ParseExpr::TokenRef(n) => n.clone(),
        ParseExpr::NontermRef { name, attrs, prec_any } => {
            let mut reqs = attrs.clone();
            if *prec_any {
                reqs.push("pr=*".into());
            }
            if reqs.is_empty() {
                name.clone()
            } else {
                format!("{name}[{}]", reqs.join(", "))
            }
        }
        ParseExpr::Named(n, x) => format!("{n}:{}", render_pe(x, 2)),
        ParseExpr::Seq(xs) => xs.iter().map(|x| render_pe(x, 2)).collect::<Vec<_>>().join(" "),
        ParseExpr::AltBranches(bs) => bs.iter().map(|(l, x)| labeled(l, x)).collect::<Vec<_>>().join(" | "),
        ParseExpr::SingletonAlt(l, x) => format!("#Alt[{}]", labeled(l, x)),
        ParseExpr::Star(x) => format!("{}*", render_pe(x, 3)),
        ParseExpr::Plus(x) => format!("{}+", render_pe(x, 3)),
        ParseExpr::Optional(x) => format!("{}?", render_pe(x, 3)),
        ParseExpr::ListExpr { flavor, elem, min, delim, trailing } => {
            let num = match min {
                0 => "::",
                1 => "::+",
                _ => "::++",
            };
            let end = match trailing {
                Trailing::None => "",
                Trailing::Optional => ":?",
                Trailing::Required => "::",
            };
            format!("{}[{}{}{}{}]", flavor.keyword(), render_pe(elem, 0), num, render_pe(delim, 0), end)
        }
        ParseExpr::PassString(s) => format!("@(`{}`)", escape(s)),
        ParseExpr::SpaceShorthand => "_".into(),
        ParseExpr::Eps => "eps".into(),
        ParseExpr::Unfold(x) => format!("~{}", render_pe(x, 2)),
    };
    if expr_level(e) < min {
        format!("({s})")
    } else {
        s
    }
}
