//! Thompson NFAs over codepoint intervals.

use std::collections::BTreeMap;

use crate::meta::{RegexExpr, TokenDecl};

/// The virtual end-of-input symbol; lies outside the codepoint range.
pub const EOF_SYM: u32 = 0x11_0000;
pub const MAX_CHAR: u32 = 0x10_FFFF;

/// Accept tag: which rule matched and, for emitting rules, which terminal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag {
    pub rule: usize,
    pub token: Option<u32>,
}

#[derive(Clone, Debug, Default)]
pub struct NState {
    pub eps: Vec<usize>,
    /// Inclusive intervals.
    pub trans: Vec<(u32, u32, usize)>,
    pub accept: Option<Tag>,
}

#[derive(Clone, Debug)]
pub struct Nfa {
    pub states: Vec<NState>,
    pub start: usize,
}

impl Default for Nfa {
    fn default() -> Self {
        Nfa { states: vec![NState::default()], start: 0 }
    }
}

impl Nfa {
    pub fn new() -> Nfa {
        Nfa::default()
    }

    fn add(&mut self) -> usize {
        self.states.push(NState::default());
        self.states.len() - 1
    }

    /// Adds `re` as a new alternative from the start state, accepting with `tag`.
    pub fn add_pattern(&mut self, re: &RegexExpr, aliases: &BTreeMap<String, &TokenDecl>, tag: Tag) {
        let s = self.add();
        let e = self.add();
        self.states[self.start].eps.push(s);
        self.build(re, aliases, s, e);
        self.states[e].accept = Some(tag);
    }

    /// NFA for a single regex with accept tag `(0, None)`.
    pub fn from_regex(re: &RegexExpr, aliases: &BTreeMap<String, &TokenDecl>) -> Nfa {
        let mut n = Nfa::new();
        n.add_pattern(re, aliases, Tag { rule: 0, token: None });
        n
    }

    fn build(&mut self, re: &RegexExpr, aliases: &BTreeMap<String, &TokenDecl>, s: usize, e: usize) {
        match re {
            RegexExpr::Literal(text) => {
                let mut cur = s;
                let chars: Vec<char> = text.chars().collect();
                if chars.is_empty() {
                    self.states[cur].eps.push(e);
                }
                for (i, c) in chars.iter().enumerate() {
                    let next = if i + 1 == chars.len() { e } else { self.add() };
                    self.states[cur].trans.push((*c as u32, *c as u32, next));
                    cur = next;
                }
            }
            RegexExpr::CharRange(a, b) => self.states[s].trans.push((*a as u32, *b as u32, e)),
            RegexExpr::Wildcard => self.states[s].trans.push((0, MAX_CHAR, e)),
            RegexExpr::Eof => self.states[s].trans.push((EOF_SYM, EOF_SYM, e)),
            RegexExpr::Concat(xs) => {
                let mut cur = s;
                for (i, x) in xs.iter().enumerate() {
                    let next = if i + 1 == xs.len() { e } else { self.add() };
                    self.build(x, aliases, cur, next);
                    cur = next;
                }
                if xs.is_empty() {
                    self.states[s].eps.push(e);
                }
            }
            RegexExpr::Alt(xs) => {
                for x in xs {
                    let a = self.add();
                    let b = self.add();
                    self.states[s].eps.push(a);
                    self.build(x, aliases, a, b);
                    self.states[b].eps.push(e);
                }
            }
            RegexExpr::Star(x) | RegexExpr::Plus(x) => {
                let a = self.add();
                let b = self.add();
                self.states[s].eps.push(a);
                self.build(x, aliases, a, b);
                self.states[b].eps.push(a);
                self.states[b].eps.push(e);
                if matches!(re, RegexExpr::Star(_)) {
                    self.states[s].eps.push(e);
                }
            }
            RegexExpr::Optional(x) => {
                self.build(x, aliases, s, e);
                self.states[s].eps.push(e);
            }
            RegexExpr::Ref(name) => {
                // Validation guarantees the reference exists and is acyclic.
                let decl = aliases[name.as_str()];
                self.build(&decl.pattern, aliases, s, e);
            }
        }
    }

    /// Sorted, deduplicated epsilon closure.
    pub fn closure(&self, set: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        let mut stack: Vec<usize> = set.to_vec();
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut seen[s], true) {
                continue;
            }
            out.push(s);
            stack.extend(self.states[s].eps.iter().copied());
        }
        out.sort_unstable();
        out
    }

    pub fn step(&self, set: &[usize], sym: u32) -> Vec<usize> {
        let mut next = Vec::new();
        for &s in set {
            for &(lo, hi, t) in &self.states[s].trans {
                if lo <= sym && sym <= hi {
                    next.push(t);
                }
            }
        }
        self.closure(&next)
    }

    /// Direct simulation: does the NFA accept exactly `input`?
    pub fn accepts(&self, input: &str) -> bool {
        let mut cur = self.closure(&[self.start]);
        for c in input.chars() {
            cur = self.step(&cur, c as u32);
        }
        cur.iter().any(|&s| self.states[s].accept.is_some())
    }
}
