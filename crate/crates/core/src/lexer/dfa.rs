//! Subset construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::nfa::{Nfa, Tag, EOF_SYM};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptTag {
    pub rule: usize,
    pub token: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaState {
    /// Sorted, disjoint inclusive intervals `(lo, hi, target)`.
    pub trans: Vec<(u32, u32, u32)>,
    pub accept: Option<AcceptTag>,
    /// Whether some accepting state is reachable from here.
    pub live: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dfa {
    pub states: Vec<DfaState>,
}

impl Dfa {
    /// Determinizes an NFA in which every accept tag means the same thing.
    pub fn from_nfa(nfa: &Nfa) -> Dfa {
        let raw = determinize(nfa);
        let accept = raw.tags.iter().map(|t| t.first().map(|t| AcceptTag { rule: t.rule, token: t.token })).collect();
        finish(&raw, accept)
    }

    pub fn next(&self, state: u32, sym: u32) -> Option<u32> {
        let trans = &self.states[state as usize].trans;
        let i = trans.partition_point(|&(_, hi, _)| hi < sym);
        match trans.get(i) {
            Some(&(lo, _, t)) if lo <= sym => Some(t),
            _ => None,
        }
    }

    pub fn accepts(&self, input: &str) -> bool {
        let mut s = 0;
        for c in input.chars() {
            match self.next(s, c as u32) {
                Some(t) => s = t,
                None => return false,
            }
        }
        self.states[s as usize].accept.is_some()
    }
}

/// Output of subset construction before accept tags are resolved.
pub struct RawDfa {
    pub trans: Vec<Vec<(u32, u32, u32)>>,
    /// All NFA accept tags present in each state.
    pub tags: Vec<Vec<Tag>>,
}

impl RawDfa {
    /// Shortest input reaching `target`, choosing the smallest symbol on ties.
    /// The second component is true when the path ends with end-of-input.
    pub fn witness(&self, target: u32) -> (String, bool) {
        let mut parent: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
        let mut q = VecDeque::from([0u32]);
        let mut seen = BTreeSet::from([0u32]);
        while let Some(s) = q.pop_front() {
            if s == target {
                break;
            }
            for &(lo, _, t) in &self.trans[s as usize] {
                if seen.insert(t) {
                    parent.insert(t, (s, lo));
                    q.push_back(t);
                }
            }
        }
        let mut syms = Vec::new();
        let mut cur = target;
        while let Some(&(p, sym)) = parent.get(&cur) {
            syms.push(sym);
            cur = p;
        }
        syms.reverse();
        let eof = syms.last() == Some(&EOF_SYM);
        let text = syms.into_iter().filter(|&c| c != EOF_SYM).filter_map(char::from_u32).collect();
        (text, eof)
    }
}

/// Subset construction. States are numbered in BFS order from the start,
/// exploring transitions in increasing symbol order.
pub fn determinize(nfa: &Nfa) -> RawDfa {
    let start = nfa.closure(&[nfa.start]);
    let mut ids: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
    let mut sets = vec![start.clone()];
    ids.insert(start, 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let set = sets[i].clone();
        let mut bounds = BTreeSet::new();
        for &s in &set {
            for &(lo, hi, _) in &nfa.states[s].trans {
                bounds.insert(lo);
                bounds.insert(hi + 1);
            }
        }
        let bounds: Vec<u32> = bounds.into_iter().collect();
        let mut row: Vec<(u32, u32, u32)> = Vec::new();
        for w in bounds.windows(2) {
            let (lo, hi) = (w[0], w[1] - 1);
            let mut next = Vec::new();
            for &s in &set {
                for &(a, b, t) in &nfa.states[s].trans {
                    if a <= lo && hi <= b {
                        next.push(t);
                    }
                }
            }
            if next.is_empty() {
                continue;
            }
            let next = nfa.closure(&next);
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = sets.len() as u32;
                    ids.insert(next.clone(), id);
                    sets.push(next);
                    id
                }
            };
            match row.last_mut() {
                Some(last) if last.2 == id && last.1 + 1 == lo => last.1 = hi,
                _ => row.push((lo, hi, id)),
            }
        }
        trans.push(row);
        i += 1;
    }
    let tags = sets
        .iter()
        .map(|set| {
            let mut t: Vec<Tag> = set.iter().filter_map(|&s| nfa.states[s].accept).collect();
            t.sort();
            t.dedup();
            t
        })
        .collect();
    RawDfa { trans, tags }
}

/// Finalizes a raw DFA once each state has a single resolved tag.
pub fn finish(raw: &RawDfa, accept: Vec<Option<AcceptTag>>) -> Dfa {
    let n = raw.trans.len();
    let mut live: Vec<bool> = accept.iter().map(|a| a.is_some()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..n {
            if !live[s] && raw.trans[s].iter().any(|&(_, _, t)| live[t as usize]) {
                live[s] = true;
                changed = true;
            }
        }
    }
    let states = (0..n)
        .map(|s| DfaState { trans: raw.trans[s].clone(), accept: accept[s].clone(), live: live[s] })
        .collect();
    Dfa { states }
}
