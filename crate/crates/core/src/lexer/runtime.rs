//! The mode-stack machine.

use serde::{Deserialize, Serialize};

use super::compile::{Action, LexerProgram};
use super::nfa::EOF_SYM;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LineCol {
    pub line: u32,
    pub col: u32,
}

/// Byte-offset to line/column conversion. Columns count codepoints.
#[derive(Clone, Debug)]
pub struct LineIndex<'a> {
    text: &'a str,
    starts: Vec<usize>,
}

impl<'a> LineIndex<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { text, starts }
    }

    pub fn line_col(&self, offset: usize) -> LineCol {
        let line = self.starts.partition_point(|&s| s <= offset) - 1;
        let start = self.starts[line];
        let col = self.text[start..offset.min(self.text.len())].chars().count();
        LineCol { line: line as u32 + 1, col: col as u32 + 1 }
    }

    /// Text of the 1-based line, without its terminator.
    pub fn line_text(&self, line: u32) -> &'a str {
        let i = line as usize - 1;
        let start = self.starts[i];
        let end = self.starts.get(i + 1).map(|e| e - 1).unwrap_or(self.text.len());
        self.text[start..end].trim_end_matches('\r')
    }
}

pub fn token_bounds_to_linecol(input: &str, offset: usize) -> (u32, u32) {
    let lc = LineIndex::new(input).line_col(offset);
    (lc.line, lc.col)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexToken {
    pub term: u32,
    pub text: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extract {
    pub mode: String,
    pub text: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexOutput {
    pub tokens: Vec<LexToken>,
    pub extracts: Vec<Extract>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LexError {
    #[error("no lexer rule matches at offset {offset}")]
    NoMatch { offset: usize },
    #[error("lexer mode stack emptied before end of input at offset {offset}")]
    PrematureEmpty { offset: usize },
    #[error("end of input reached in lexer mode `{mode}`")]
    StackNonemptyAtEof { mode: String },
    #[error("lexer made no progress at offset {offset}")]
    Stuck { offset: usize },
}

impl LexError {
    pub fn offset(&self, input_len: usize) -> usize {
        match self {
            LexError::NoMatch { offset } | LexError::PrematureEmpty { offset } | LexError::Stuck { offset } => *offset,
            LexError::StackNonemptyAtEof { .. } => input_len,
        }
    }
}

struct Frame {
    mode: u32,
    buf: String,
    start: Option<usize>,
    end: usize,
}

impl Frame {
    fn credit(&mut self, text: &str, start: usize, end: usize) {
        self.buf.push_str(text);
        self.start.get_or_insert(start);
        self.end = end;
    }
}

const MAX_IDLE_STEPS: usize = 10_000;

/// Longest match from `pos` in `mode`: returns `(rule, token, end)`.
fn munch(prog: &LexerProgram, mode: u32, input: &str, pos: usize) -> Option<(usize, Option<u32>, usize)> {
    let dfa = &prog.modes[mode as usize].dfa;
    let mut state = 0u32;
    let mut best = None;
    let mut iter = input[pos..].char_indices();
    loop {
        let s = &dfa.states[state as usize];
        if let Some(a) = &s.accept {
            let here = iter.clone().next().map(|(i, _)| pos + i).unwrap_or(input.len());
            best = Some((a.rule, a.token, here));
        }
        if !s.live {
            break;
        }
        match iter.next() {
            Some((_, c)) => match dfa.next(state, c as u32) {
                Some(t) => state = t,
                None => break,
            },
            None => {
                if let Some(t) = dfa.next(state, EOF_SYM) {
                    if let Some(a) = &dfa.states[t as usize].accept {
                        best = Some((a.rule, a.token, input.len()));
                    }
                }
                break;
            }
        }
    }
    best
}

/// Runs the lexer over `input` starting in the main mode.
pub fn lex(prog: &LexerProgram, input: &str) -> Result<LexOutput, LexError> {
    let mut out = LexOutput::default();
    let mut stack = vec![Frame { mode: prog.main, buf: String::new(), start: None, end: 0 }];
    let mut pos = 0;
    let mut idle = 0;
    loop {
        let Some(top) = stack.last() else {
            if pos == input.len() {
                return Ok(out);
            }
            return Err(LexError::PrematureEmpty { offset: pos });
        };
        let mode = top.mode;
        let Some((rule, token, end)) = munch(prog, mode, input, pos) else {
            if pos == input.len() {
                return Err(LexError::StackNonemptyAtEof { mode: prog.modes[mode as usize].name.clone() });
            }
            return Err(LexError::NoMatch { offset: pos });
        };
        let text = &input[pos..end];
        let mut consumed = false;
        let mut stack_changed = false;
        for act in &prog.modes[mode as usize].rules[rule] {
            match *act {
                Action::Emit | Action::Pass => {
                    if matches!(act, Action::Emit) {
                        let term = token.expect("emitting rule carries a token");
                        out.tokens.push(LexToken { term, text: text.to_string(), start: pos, end });
                    }
                    if !consumed {
                        consumed = true;
                        if let Some(f) = stack.last_mut() {
                            f.credit(text, pos, end);
                        }
                    }
                }
                Action::Push(m) => {
                    stack_changed = true;
                    stack.push(Frame { mode: m, buf: String::new(), start: None, end: pos });
                }
                Action::Pop | Action::PopExtract | Action::PopEmit(_) => {
                    stack_changed = true;
                    if let Some(f) = stack.pop() {
                        let start = f.start.unwrap_or(pos);
                        let fend = if f.start.is_some() { f.end } else { pos };
                        match *act {
                            Action::PopExtract => out.extracts.push(Extract {
                                mode: prog.modes[f.mode as usize].name.clone(),
                                text: f.buf,
                                start,
                                end: fend,
                            }),
                            Action::PopEmit(term) => {
                                out.tokens.push(LexToken { term, text: f.buf, start, end: fend });
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        if consumed && end > pos {
            pos = end;
            idle = 0;
        } else {
            idle += 1;
            if !stack_changed || idle > MAX_IDLE_STEPS {
                return Err(LexError::Stuck { offset: pos });
            }
        }
    }
}
