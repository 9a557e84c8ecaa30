use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::dfa::{determinize, finish, AcceptTag, Dfa};
use super::nfa::{Nfa, Tag, EOF_SYM};
use super::terminals::{Terminal, Terminals};
use crate::meta::render::render_regex;
use crate::meta::{LangSpec, LexerAction, Loc, RegexExpr, TokenDecl, TokenKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Emit,
    Pass,
    Push(u32),
    Pop,
    PopExtract,
    PopEmit(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledMode {
    pub name: String,
    pub dfa: Dfa,
    /// Action list per rule, indexed by accept tag rule.
    pub rules: Vec<Vec<Action>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexerProgram {
    pub terminals: Terminals,
    pub main: u32,
    pub modes: Vec<CompiledMode>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LexCompileError {
    #[error("lexer ambiguity in mode `{mode}`: input {witness:?}{eof} matches both {first} and {second}", eof = if *.at_eof { " followed by eof" } else { "" })]
    Ambiguity { mode: String, witness: String, at_eof: bool, first: String, second: String },
    #[error("{loc}: rule `{pattern}` in mode `{mode}` matches the empty string")]
    EmptyMatch { mode: String, pattern: String, loc: Loc },
    #[error("{loc}: {message}")]
    Invalid { loc: Loc, message: String },
}

enum Leaf<'a> {
    Opaque(&'a TokenDecl),
    Literal(&'a str),
}

/// Expands an emitting rule's pattern into the tokens it can emit.
fn emit_leaves<'a>(
    e: &'a RegexExpr,
    decls: &BTreeMap<String, &'a TokenDecl>,
    out: &mut Vec<Leaf<'a>>,
) -> Result<(), String> {
    match e {
        RegexExpr::Alt(xs) => xs.iter().try_for_each(|x| emit_leaves(x, decls, out)),
        RegexExpr::Literal(s) => {
            out.push(Leaf::Literal(s));
            Ok(())
        }
        RegexExpr::Ref(n) => {
            let d = decls[n.as_str()];
            match d.kind {
                TokenKind::Opaque => {
                    out.push(Leaf::Opaque(d));
                    Ok(())
                }
                TokenKind::Alias => emit_leaves(&d.pattern, decls, out),
            }
        }
        other => Err(format!(
            "`emit` needs a token, a literal or an alternation of them, found `{}`",
            render_regex(other)
        )),
    }
}

fn is_fallback(p: &RegexExpr) -> bool {
    matches!(p, RegexExpr::Wildcard)
}

/// Compiles all lexer modes. Terminal ids: `$`, then opaque tokens in
/// declaration order, then literal tokens in order of first emission.
pub fn compile_lexer(spec: &LangSpec) -> Result<LexerProgram, LexCompileError> {
    let decls: BTreeMap<String, &TokenDecl> = spec.token_decls.iter().map(|t| (t.name.clone(), t)).collect();
    let mut terminals = Terminals::default();
    for t in &spec.token_decls {
        if t.kind == TokenKind::Opaque {
            terminals.intern(Terminal::Opaque(t.name.clone()));
        }
    }
    let mode_ids: BTreeMap<&str, u32> =
        spec.lexer.modes.iter().enumerate().map(|(i, m)| (m.name.as_str(), i as u32)).collect();

    let mut modes = Vec::new();
    for m in &spec.lexer.modes {
        let mut nfa = Nfa::new();
        let mut rules = Vec::new();
        for (ri, r) in m.rules.iter().enumerate() {
            let emits = r.actions.iter().any(|a| matches!(a, LexerAction::Emit));
            if emits {
                let mut leaves = Vec::new();
                emit_leaves(&r.pattern, &decls, &mut leaves)
                    .map_err(|message| LexCompileError::Invalid { loc: r.loc, message })?;
                for leaf in leaves {
                    match leaf {
                        Leaf::Opaque(d) => {
                            let id = terminals.intern(Terminal::Opaque(d.name.clone()));
                            nfa.add_pattern(&d.pattern, &decls, Tag { rule: ri, token: Some(id) });
                        }
                        Leaf::Literal(s) => {
                            let id = terminals.intern(Terminal::Literal(s.to_string()));
                            nfa.add_pattern(&RegexExpr::Literal(s.to_string()), &decls, Tag { rule: ri, token: Some(id) });
                        }
                    }
                }
            } else {
                nfa.add_pattern(&r.pattern, &decls, Tag { rule: ri, token: None });
            }
            let acts = r
                .actions
                .iter()
                .map(|a| match a {
                    LexerAction::Emit => Action::Emit,
                    LexerAction::Pass => Action::Pass,
                    LexerAction::Push(t) => Action::Push(mode_ids[t.as_str()]),
                    LexerAction::Pop => Action::Pop,
                    LexerAction::PopExtract => Action::PopExtract,
                    LexerAction::PopEmit(t) => Action::PopEmit(terminals.intern(Terminal::Opaque(t.clone()))),
                })
                .collect();
            rules.push(acts);
        }

        let raw = determinize(&nfa);
        let describe = |t: &Tag, terminals: &Terminals| {
            let r = &m.rules[t.rule];
            let mut s = format!("rule {} (`{}`", t.rule + 1, render_regex(&r.pattern));
            if let Some(tok) = t.token {
                let _ = write!(s, ", emitting {}", terminals.get(tok));
            }
            s.push(')');
            s
        };
        let mut accept = Vec::new();
        for (si, tags) in raw.tags.iter().enumerate() {
            if tags.is_empty() {
                accept.push(None);
                continue;
            }
            if si == 0 {
                let r = &m.rules[tags[0].rule];
                return Err(LexCompileError::EmptyMatch {
                    mode: m.name.clone(),
                    pattern: render_regex(&r.pattern),
                    loc: r.loc,
                });
            }
            let chosen = resolve(tags, &m.rules.iter().map(|r| is_fallback(&r.pattern)).collect::<Vec<_>>(), &terminals);
            match chosen {
                Ok(t) => accept.push(Some(AcceptTag { rule: t.rule, token: t.token })),
                Err((a, b)) => {
                    let (witness, at_eof) = raw.witness(si as u32);
                    return Err(LexCompileError::Ambiguity {
                        mode: m.name.clone(),
                        witness,
                        at_eof,
                        first: describe(&a, &terminals),
                        second: describe(&b, &terminals),
                    });
                }
            }
        }
        modes.push(CompiledMode { name: m.name.clone(), dfa: finish(&raw, accept), rules });
    }
    let main = mode_ids[spec.lexer.main_mode.as_str()];
    Ok(LexerProgram { terminals, main, modes })
}

/// Picks the single action for a DFA state. A bare wildcard rule yields to
/// any other rule, and within one emitting rule a literal beats an opaque
/// token (reserved words). Anything else is an ambiguity.
fn resolve(tags: &[Tag], fallback: &[bool], terminals: &Terminals) -> Result<Tag, (Tag, Tag)> {
    let primary: Vec<Tag> = tags.iter().copied().filter(|t| !fallback[t.rule]).collect();
    let cands = if primary.is_empty() { tags.to_vec() } else { primary };
    if cands.len() == 1 {
        return Ok(cands[0]);
    }
    if let Some(t) = cands.iter().find(|t| t.rule != cands[0].rule) {
        return Err((cands[0], *t));
    }
    let lits: Vec<Tag> = cands
        .iter()
        .copied()
        .filter(|t| matches!(t.token.map(|id| terminals.get(id)), Some(Terminal::Literal(_))))
        .collect();
    match lits.len() {
        1 => Ok(lits[0]),
        0 => Err((cands[0], cands[1])),
        _ => Err((lits[0], lits[1])),
    }
}

impl LexerProgram {
    pub fn mode_id(&self, name: &str) -> Option<u32> {
        self.modes.iter().position(|m| m.name == name).map(|i| i as u32)
    }

    /// Deterministic adjacency listing of every mode DFA.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, m) in self.modes.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let main = if i as u32 == self.main { " (main)" } else { "" };
            let _ = writeln!(out, "mode {}{}: {} states", m.name, main, m.dfa.states.len());
            for (si, s) in m.dfa.states.iter().enumerate() {
                let _ = write!(out, "  state {si}");
                if let Some(a) = &s.accept {
                    let _ = write!(out, " accept rule {}", a.rule + 1);
                    if let Some(t) = a.token {
                        let _ = write!(out, " emit {}", self.terminals.get(t));
                    }
                    let acts: Vec<String> = m.rules[a.rule].iter().map(|x| self.action_name(*x)).collect();
                    let _ = write!(out, " [{}]", acts.join(" "));
                }
                if !s.live {
                    out.push_str(" dead");
                }
                out.push('\n');
                for &(lo, hi, t) in &s.trans {
                    let _ = writeln!(out, "    {} -> {t}", sym_range(lo, hi));
                }
            }
        }
        out
    }

    fn action_name(&self, a: Action) -> String {
        match a {
            Action::Emit => "emit".into(),
            Action::Pass => "pass".into(),
            Action::Push(m) => format!("push {}", self.modes[m as usize].name),
            Action::Pop => "pop".into(),
            Action::PopExtract => "pop_extract".into(),
            Action::PopEmit(t) => format!("pop_emit {}", self.terminals.get(t)),
        }
    }
}

fn sym_name(c: u32) -> String {
    if c == EOF_SYM {
        return "eof".into();
    }
    match char::from_u32(c) {
        Some(ch) if !ch.is_control() && ch != ' ' => format!("{ch:?}"),
        _ => format!("U+{c:04X}"),
    }
}

fn sym_range(lo: u32, hi: u32) -> String {
    if lo == hi {
        sym_name(lo)
    } else {
        format!("{}..{}", sym_name(lo), sym_name(hi))
    }
}
