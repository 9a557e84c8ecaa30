//! Conflict tracing: for each conflict site, a shortest viable prefix and two
//! completions showing that either competing action can lead to a parse.

mod shortest;

use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt::Write;
use std::rc::Rc;

use crate::grammar::{Cfg, NtId, Sym};
use crate::lexer::Terminals;
use crate::lr::{ConflictSite, GSym, LrAction, LrAutomaton, StateId};

pub use shortest::ShortestSentences;

pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrefixRow {
    /// The automaton entered a sub-automaton for this nonterminal.
    Recur(String),
    Sym { symbol: String, terminals: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictExemplar {
    pub start: String,
    pub rows: Vec<PrefixRow>,
    pub action_left: String,
    pub action_right: String,
    pub lookahead: Vec<String>,
    /// Both start with the shared lookahead; `$` padding is dropped.
    pub completion_left: Vec<String>,
    pub completion_right: Vec<String>,
    /// Terminal ids of the prefix, for replaying.
    pub prefix_terms: Vec<u32>,
    pub lookahead_terms: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("conflict in state {state}: search budget exceeded")]
    SearchBudgetExceeded { state: StateId, partial: Box<ConflictExemplar> },
    #[error("conflict in state {state} is unreachable")]
    Unreachable { state: StateId },
}

/// Names synthesized nonterminals `X0`, `X1`, ... in order of first use.
struct Aliases<'a> {
    cfg: &'a Cfg,
    seen: RefCell<Vec<NtId>>,
}

impl Aliases<'_> {
    fn name(&self, s: Sym) -> String {
        self.lookup(s).0
    }

    /// The name and, on first use, the definition `X0=(...)`.
    fn lookup(&self, s: Sym) -> (String, Option<String>) {
        match s {
            Sym::N(n) if self.cfg.nonterms[n as usize].synthesized => {
                let mut seen = self.seen.borrow_mut();
                let (i, fresh) = match seen.iter().position(|&m| m == n) {
                    Some(i) => (i, false),
                    None => {
                        seen.push(n);
                        (seen.len() - 1, true)
                    }
                };
                let name = format!("X{i}");
                let def = fresh.then(|| {
                    let d = self.cfg.nonterms[n as usize].display.clone().unwrap_or_else(|| self.cfg.nt_name(n).into());
                    format!("{name}={d}")
                });
                (name, def)
            }
            _ => (self.cfg.sym_name(s), None),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Config {
    /// (state, class of the nonterminal that led here)
    stack: Vec<(StateId, u32)>,
    /// (stack index of the caller, nonterminal)
    frames: Vec<(usize, NtId)>,
    queue: Vec<u32>,
}

/// Persistent list of appended terminals, newest first.
struct Trail(u32, Option<Rc<Trail>>);

fn trail_vec(t: &Option<Rc<Trail>>) -> Vec<u32> {
    let mut v = vec![];
    let mut cur = t.clone();
    while let Some(n) = cur {
        v.push(n.0);
        cur = n.1.clone();
    }
    v.reverse();
    v
}

pub struct Tracer<'a> {
    cfg: &'a Cfg,
    lr: &'a LrAutomaton,
    short: ShortestSentences,
    acts: HashMap<(StateId, u32), Vec<LrAction>>,
    la_ix: HashMap<Vec<u32>, u32>,
    pub budget: usize,
}

impl<'a> Tracer<'a> {
    pub fn new(cfg: &'a Cfg, lr: &'a LrAutomaton) -> Tracer<'a> {
        let mut acts = HashMap::new();
        for (s, st) in lr.states.iter().enumerate() {
            for (&la, &a) in &st.actions {
                acts.insert((s as StateId, la), vec![a]);
            }
        }
        for c in &lr.conflicts {
            acts.insert((c.state, c.la), c.actions.iter().map(|(a, _)| *a).collect());
        }
        let la_ix = lr.lookaheads.iter().enumerate().map(|(i, l)| (l.clone(), i as u32)).collect();
        Tracer { cfg, lr, short: ShortestSentences::compute(cfg, lr), acts, la_ix, budget: DEFAULT_BUDGET }
    }

    pub fn shortest(&self) -> &ShortestSentences {
        &self.short
    }

    /// Dijkstra over automaton edges from every start state, weighted by the
    /// length of the shortest sentence each edge stands for. Returns the
    /// start index and the path as (edge label, state); `None` labels are
    /// the start and recursive-descent entries.
    fn shortest_path(&self, target: StateId) -> Option<(usize, Vec<(Option<GSym>, StateId)>)> {
        // Ties on length break on the concrete terminal string (terminal ids
        // follow declaration order), then on the edge labels.
        type Key = (usize, Vec<u32>, usize, usize, Vec<Option<GSym>>);
        let mut dist: HashMap<StateId, Key> = HashMap::new();
        let mut pred: HashMap<StateId, (StateId, Option<GSym>)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        for (i, &s) in self.lr.starts.iter().enumerate() {
            dist.entry(s).or_insert_with(|| {
                heap.push(Reverse(((0, vec![], 0, i, vec![]), s)));
                (0, vec![], 0, i, vec![])
            });
        }
        while let Some(Reverse((key, s))) = heap.pop() {
            if dist.get(&s) != Some(&key) {
                continue;
            }
            if s == target {
                break;
            }
            let st = &self.lr.states[s as usize];
            let mut edges: Vec<(Option<GSym>, StateId, Vec<u32>)> = vec![];
            for (&g, &t) in &st.trans {
                let w = match g {
                    GSym::T(t) => Some(vec![t]),
                    GSym::N(n, cl) => self.short.class_sentence(n, cl).map(|s| s.to_vec()),
                };
                if let Some(w) = w {
                    edges.push((Some(g), t, w));
                }
            }
            for a in st.actions.values() {
                if let LrAction::Recur { sub, .. } = a {
                    edges.push((None, *sub, vec![]));
                }
            }
            for (g, t, w) in edges {
                let mut labels = key.4.clone();
                labels.push(g);
                let mut terms = key.1.clone();
                terms.extend(&w);
                let nd = (key.0 + w.len(), terms, key.2 + 1, key.3, labels);
                if dist.get(&t).is_none_or(|d| nd < *d) {
                    dist.insert(t, nd.clone());
                    pred.insert(t, (s, g));
                    heap.push(Reverse((nd, t)));
                }
            }
        }
        let origin = dist.get(&target)?.3;
        let mut path = vec![];
        let mut cur = target;
        while let Some(&(p, g)) = pred.get(&cur) {
            path.push((g, cur));
            cur = p;
        }
        path.push((None, cur));
        path.reverse();
        Some((origin, path))
    }

    fn action_name(&self, a: &LrAction, al: &Aliases) -> String {
        match a {
            LrAction::Shift(_) => "Shift".into(),
            LrAction::Reduce(p) => format!("Reduce({})", self.cfg.prod_string_with(*p, &|s| al.name(s))),
            LrAction::Accept(_) => "Accept".into(),
            LrAction::Recur { nt, .. } => format!("Recur({})", self.cfg.nt_name(*nt)),
            LrAction::Ret => "Ret".into(),
        }
    }

    fn term_names(&self, ts: &[u32]) -> Vec<String> {
        ts.iter().filter(|&&t| t != Terminals::END).map(|&t| self.cfg.terminals.name(t)).collect()
    }

    pub fn trace(&self, site: &ConflictSite) -> Result<ConflictExemplar, TraceError> {
        let (origin, path) = self.shortest_path(site.state).ok_or(TraceError::Unreachable { state: site.state })?;
        let al = Aliases { cfg: self.cfg, seen: RefCell::new(vec![]) };
        let start_nt = self.cfg.starts[origin];
        let mut rows = vec![];
        let mut prefix_terms = vec![];
        let mut stack: Vec<(StateId, u32)> = vec![];
        let mut frames = vec![];
        for (g, s) in &path {
            match g {
                None if !stack.is_empty() => {
                    let prev = stack.len() - 1;
                    let nt = self.recur_nt(stack[prev].0, *s);
                    frames.push((prev, nt));
                    rows.push(PrefixRow::Recur(self.cfg.nt_name(nt).into()));
                    stack.push((*s, 0));
                }
                None => stack.push((*s, 0)),
                Some(GSym::T(t)) => {
                    prefix_terms.push(*t);
                    rows.push(PrefixRow::Sym { symbol: self.cfg.terminals.name(*t), terminals: self.term_names(&[*t]) });
                    stack.push((*s, 0));
                }
                Some(GSym::N(n, cl)) => {
                    let sent = self.short.class_sentence(*n, *cl).expect("weighted edge").to_vec();
                    let (name, def) = al.lookup(Sym::N(*n));
                    rows.push(PrefixRow::Sym { symbol: def.unwrap_or(name), terminals: self.term_names(&sent) });
                    prefix_terms.extend(sent);
                    stack.push((*s, *cl));
                }
            }
        }
        let la = self.lr.lookaheads[site.la as usize].clone();
        // Shift goes on the right, as in the usual reading "reduce or shift".
        let mut competing: Vec<LrAction> = site.actions.iter().map(|(a, _)| *a).collect();
        competing.sort_by_key(|a| matches!(a, LrAction::Shift(_)));
        let (a0, a1) = (competing[0], competing[1]);
        let mut ex = ConflictExemplar {
            start: self.cfg.nt_name(start_nt).into(),
            rows,
            action_left: self.action_name(&a0, &al),
            action_right: self.action_name(&a1, &al),
            lookahead: self.term_names(&la),
            completion_left: vec![],
            completion_right: vec![],
            prefix_terms,
            lookahead_terms: la.clone(),
        };
        let init = Config { stack, frames, queue: la.clone() };
        let mut out = vec![];
        for a in [a0, a1] {
            match self.complete(&init, a) {
                Some(ts) => {
                    let mut all = la.clone();
                    all.extend(ts);
                    out.push(self.term_names(&all));
                }
                None => {
                    return Err(TraceError::SearchBudgetExceeded { state: site.state, partial: Box::new(ex) });
                }
            }
        }
        ex.completion_right = out.pop().expect("two");
        ex.completion_left = out.pop().expect("two");
        Ok(ex)
    }

    fn recur_nt(&self, from: StateId, sub: StateId) -> NtId {
        self.lr.states[from as usize]
            .actions
            .values()
            .find_map(|a| match a {
                LrAction::Recur { nt, sub: s } if *s == sub => Some(*nt),
                _ => None,
            })
            .expect("recur edge")
    }

    fn goto(&self, s: StateId, n: NtId, cl: u32) -> Option<StateId> {
        self.lr.states[s as usize].trans.get(&GSym::N(n, cl)).copied()
    }

    /// Applies one action. `Ok(None)` is acceptance; `Err(())` a dead end.
    /// A shift leaves the queue one short; the caller refills it.
    fn apply(&self, c: &Config, a: LrAction) -> Result<Option<Config>, ()> {
        let mut c = c.clone();
        match a {
            LrAction::Shift(t) => {
                c.stack.push((t, 0));
                c.queue.remove(0);
            }
            LrAction::Reduce(p) => {
                let prod = self.cfg.prod(p);
                let keep = c.stack.len().checked_sub(prod.rhs.len()).ok_or(())?;
                if c.frames.last().is_some_and(|&(f, _)| keep <= f + 1) {
                    return Err(());
                }
                c.stack.truncate(keep);
                let cl = self.lr.prod_class[p as usize];
                let top = c.stack.last().ok_or(())?.0;
                let t = self.goto(top, prod.lhs, cl).ok_or(())?;
                c.stack.push((t, cl));
            }
            LrAction::Accept(_) => {
                return if c.queue.iter().all(|&t| t == Terminals::END) && c.frames.is_empty() {
                    Ok(None)
                } else {
                    Err(())
                };
            }
            LrAction::Recur { sub, nt } => {
                c.frames.push((c.stack.len() - 1, nt));
                c.stack.push((sub, 0));
            }
            LrAction::Ret => {
                let (f, nt) = c.frames.pop().ok_or(())?;
                let cl = c.stack.last().ok_or(())?.1;
                c.stack.truncate(f + 1);
                let t = self.goto(c.stack[f].0, nt, cl).ok_or(())?;
                c.stack.push((t, cl));
            }
        }
        Ok(Some(c))
    }

    /// Shortest terminal continuation after forcing `first`, by 0-1 BFS over
    /// parser configurations. `None` when the budget runs out.
    fn complete(&self, init: &Config, first: LrAction) -> Option<Vec<u32>> {
        let k = self.lr.k;
        let nterms = self.cfg.terminals.len() as u32;
        let mut queue: VecDeque<(Config, Option<Rc<Trail>>, Option<LrAction>)> = VecDeque::new();
        let mut seen: HashSet<Config> = HashSet::new();
        queue.push_back((init.clone(), None, Some(first)));
        let mut nodes = 0;
        while let Some((c, trail, forced)) = queue.pop_front() {
            nodes += 1;
            if nodes > self.budget {
                return None;
            }
            if c.queue.len() < k {
                if c.queue.last() == Some(&Terminals::END) {
                    let mut n = c.clone();
                    n.queue.push(Terminals::END);
                    queue.push_front((n, trail, forced));
                } else {
                    for t in 0..nterms {
                        let mut n = c.clone();
                        n.queue.push(t);
                        if t == Terminals::END {
                            queue.push_front((n, trail.clone(), forced));
                        } else {
                            queue.push_back((n, Some(Rc::new(Trail(t, trail.clone()))), forced));
                        }
                    }
                }
                continue;
            }
            if forced.is_none() && !seen.insert(c.clone()) {
                continue;
            }
            let acts = match forced {
                Some(a) => vec![a],
                None => {
                    let Some(&la) = self.la_ix.get(&c.queue) else { continue };
                    let top = c.stack.last().expect("nonempty").0;
                    self.acts.get(&(top, la)).cloned().unwrap_or_default()
                }
            };
            for a in acts {
                match self.apply(&c, a) {
                    Ok(None) => return Some(trail_vec(&trail)),
                    Ok(Some(n)) => queue.push_front((n, trail.clone(), None)),
                    Err(()) => {}
                }
            }
        }
        None
    }

    pub fn trace_all(&self) -> Vec<Result<ConflictExemplar, TraceError>> {
        self.lr.conflicts.iter().map(|c| self.trace(c)).collect()
    }
}

fn pad_left(s: &str, w: usize) -> String {
    format!("{}{}", " ".repeat(w.saturating_sub(s.chars().count())), s)
}

/// Two-column layout: symbols and their terminal exemplars, then the two
/// actions, then the two completions one terminal per line.
pub fn render_conflict_report(exemplars: &[ConflictExemplar]) -> String {
    let n = exemplars.len();
    let mut out = String::new();
    for (i, ex) in exemplars.iter().enumerate() {
        let mut lines: Vec<(String, String, String)> = vec![];
        let start = format!("&{}", ex.start);
        lines.push((start.clone(), start, String::new()));
        for r in &ex.rows {
            match r {
                PrefixRow::Recur(nt) => lines.push((String::new(), format!("RecurStep({nt})"), String::new())),
                PrefixRow::Sym { symbol, terminals } => {
                    lines.push((symbol.clone(), terminals.join(" "), String::new()))
                }
            }
        }
        lines.push(Default::default());
        lines.push((String::new(), ex.action_left.clone(), ex.action_right.clone()));
        lines.push(Default::default());
        let rows = ex.completion_left.len().max(ex.completion_right.len());
        for j in 0..rows {
            let l = ex.completion_left.get(j).cloned().unwrap_or_default();
            let r = ex.completion_right.get(j).cloned().unwrap_or_default();
            lines.push((String::new(), l, r));
        }
        let w1 = lines.iter().map(|l| l.0.chars().count()).max().unwrap_or(0);
        let w2 = lines.iter().map(|l| l.1.chars().count()).max().unwrap_or(0);
        let _ = writeln!(out, "    ===== LR conflict {} of {}", i + 1, n);
        out.push('\n');
        for (a, b, c) in lines {
            let line = format!("    {}    {}    {}", pad_left(&a, w1), pad_left(&b, w2), c);
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests;
