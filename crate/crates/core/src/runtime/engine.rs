//! The table-driven LR(k) engine with recursive-descent frames.

use std::sync::Arc;

use super::error::{ParseError, ParseErrorKind};
use super::value::{Bounds, Node, Seq, Token, Value};
use crate::grammar::{Build, Cfg, NtId};
use crate::lexer::{LexToken, Terminals};
use crate::lr::{LrAction, LrTables};

struct Entry {
    state: u32,
    /// Goto class of the nonterminal that produced this entry.
    class: u32,
    value: Option<Value>,
    lo: usize,
    hi: usize,
}

impl Entry {
    fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }
}

/// Runs the automaton from the start state of `start` over a token stream.
pub fn parse_tokens(
    cfg: &Cfg,
    tables: &LrTables,
    tokens: &[LexToken],
    input_len: usize,
    start: NtId,
) -> Result<Value, ParseError> {
    let k = tables.k;
    let s0 = tables.start_state(start).expect("start nonterminal is a main nonterminal");
    let mut stack = vec![Entry { state: s0, class: 0, value: None, lo: 0, hi: 0 }];
    let mut frames: Vec<(usize, NtId)> = Vec::new();
    let mut pos = 0usize;
    let mut la = vec![Terminals::END; k];
    loop {
        for (i, slot) in la.iter_mut().enumerate() {
            *slot = tokens.get(pos + i).map(|t| t.term).unwrap_or(Terminals::END);
        }
        let here = tokens.get(pos).map(|t| t.start).unwrap_or(input_len);
        let top = stack.last().expect("stack").state;
        match tables.action(top, &la) {
            None => {
                let i = viable_prefix(tables, top, &la);
                return Err(unexpected(tokens.get(pos + i), input_len, top));
            }
            Some(LrAction::Shift(t)) => {
                let tok = &tokens[pos];
                let b = Bounds::new(tok.start, tok.end);
                stack.push(Entry {
                    state: t,
                    class: 0,
                    value: Some(Value::Token(Token { term: tok.term, text: tok.text.clone(), bounds: b })),
                    lo: tok.start,
                    hi: tok.end,
                });
                pos += 1;
            }
            Some(LrAction::Reduce(p)) => {
                let prod = cfg.prod(p);
                let mut rhs = stack.split_off(stack.len() - prod.rhs.len());
                let (lo, hi) = extent(&rhs, 0, rhs.len()).unwrap_or((here, here));
                let v = eval(&prod.build, &mut rhs, here);
                let cl = tables.prod_class[p as usize];
                let under = stack.last().expect("stack").state;
                let t = tables.goto(under, prod.lhs, cl).expect("goto after reduce");
                stack.push(Entry { state: t, class: cl, value: Some(v), lo, hi });
            }
            Some(LrAction::Accept(_)) => {
                let e = stack.pop().expect("result");
                return Ok(e.value.expect("value"));
            }
            Some(LrAction::Recur { nt, sub }) => {
                frames.push((stack.len() - 1, nt));
                stack.push(Entry { state: sub, class: 0, value: None, lo: here, hi: here });
            }
            Some(LrAction::Ret) => {
                let (f, nt) = frames.pop().expect("return frame");
                let e = stack.pop().expect("result");
                stack.truncate(f + 1);
                let t = tables.goto(stack[f].state, nt, e.class).expect("goto after return");
                stack.push(Entry { state: t, ..e });
            }
        }
    }
}

/// With k > 1 the lookahead can fail past its first token: blame the first
/// token at which it stops being a prefix of any valid lookahead.
fn viable_prefix(tables: &LrTables, state: u32, la: &[u32]) -> usize {
    tables.rows[state as usize]
        .actions
        .iter()
        .map(|(w, _)| w.iter().zip(la).take_while(|(a, b)| a == b).count())
        .max()
        .unwrap_or(0)
        .min(la.len().saturating_sub(1))
}

fn unexpected(tok: Option<&LexToken>, input_len: usize, state: u32) -> ParseError {
    match tok {
        Some(t) => ParseError {
            kind: ParseErrorKind::UnexpectedToken { state },
            message: format!("Unexpected token: `{}`", t.text),
            bounds: Bounds::new(t.start, t.end),
        },
        None => ParseError {
            kind: ParseErrorKind::UnexpectedEof { state },
            message: "Unexpected end of input".into(),
            bounds: Bounds::new(input_len, input_len),
        },
    }
}

/// First to last consumed byte over entries `a..b`; empty entries do not count.
fn extent(es: &[Entry], a: usize, b: usize) -> Option<(usize, usize)> {
    let live = es[a..b].iter().filter(|e| !e.is_empty());
    let lo = live.clone().map(|e| e.lo).min()?;
    let hi = live.map(|e| e.hi).max()?;
    Some((lo, hi))
}

fn span_bounds(es: &[Entry], span: (u32, u32), here: usize) -> Bounds {
    match extent(es, span.0 as usize, span.1 as usize) {
        Some((lo, hi)) => Bounds::new(lo, hi),
        None => {
            let at = es.get(span.0 as usize).map(|e| e.lo).unwrap_or(here);
            Bounds::new(at, at)
        }
    }
}

fn eval(b: &Build, es: &mut [Entry], here: usize) -> Value {
    match b {
        Build::Slot(i) => es[*i as usize].value.take().expect("slot value used once"),
        Build::Node { ty, span, fields } => {
            let bounds = span_bounds(es, *span, here);
            let fields = fields.iter().map(|(n, fb)| (n.clone(), eval(fb, es, here))).collect();
            Value::Node(Arc::new(Node { ty: ty.clone(), fields, bounds }))
        }
        Build::Label { ty, label, span } => {
            let mut ty = ty.clone();
            ty.push(label.clone());
            Value::Node(Arc::new(Node { ty, fields: vec![], bounds: span_bounds(es, *span, here) }))
        }
        Build::Bool(x) => Value::Bool(*x),
        Build::OptNone => Value::Opt(None),
        Build::OptSome(x) => Value::Opt(Some(Box::new(eval(x, es, here)))),
        Build::SeqNew(xs) => Value::Seq(Seq { items: xs.iter().map(|x| eval(x, es, here)).collect(), trailing: false }),
        Build::SeqPush { list, elem } => {
            let mut s = take_seq(es, *list);
            s.items.push(eval(elem, es, here));
            Value::Seq(s)
        }
        Build::SeqTrailing { list } => {
            let mut s = take_seq(es, *list);
            s.trailing = true;
            Value::Seq(s)
        }
    }
}

fn take_seq(es: &mut [Entry], i: u32) -> Seq {
    match es[i as usize].value.take() {
        Some(Value::Seq(s)) => s,
        _ => panic!("list slot does not hold a sequence"),
    }
}
