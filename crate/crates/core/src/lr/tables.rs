//! Serializable parse tables and their in-memory index.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::build::{GSym, LrAction, LrAutomaton, StateId};
use crate::grammar::NtId;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub actions: Vec<(Vec<u32>, LrAction)>,
    pub gotos: Vec<(NtId, u32, StateId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrTables {
    pub k: usize,
    /// (main nonterminal, start state)
    pub starts: Vec<(NtId, StateId)>,
    pub rows: Vec<Row>,
    /// Class id per grammar production, for goto lookup after a reduction.
    pub prod_class: Vec<u32>,
    #[serde(skip)]
    index: Index,
}

#[derive(Clone, Debug, Default)]
struct Index {
    /// Used when k = 1: `dense[state * nterms + t]`.
    dense: Vec<Option<LrAction>>,
    nterms: usize,
    sparse: HashMap<(StateId, Vec<u32>), LrAction>,
    gotos: HashMap<(StateId, NtId, u32), StateId>,
}

impl PartialEq for Index {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for Index {}

impl LrTables {
    pub fn from_automaton(a: &LrAutomaton, cfg_starts: &[NtId], nterms: usize) -> LrTables {
        let rows = a
            .states
            .iter()
            .map(|st| Row {
                actions: st.actions.iter().map(|(la, act)| (a.lookaheads[*la as usize].clone(), *act)).collect(),
                gotos: st
                    .trans
                    .iter()
                    .filter_map(|(g, t)| match g {
                        GSym::N(n, c) => Some((*n, *c, *t)),
                        GSym::T(_) => None,
                    })
                    .collect(),
            })
            .collect();
        let mut t = LrTables {
            k: a.k,
            starts: cfg_starts.iter().copied().zip(a.starts.iter().copied()).collect(),
            rows,
            prod_class: a.prod_class.clone(),
            index: Index::default(),
        };
        t.reindex(nterms);
        t
    }

    /// Rebuilds the lookup index; call after deserializing.
    pub fn reindex(&mut self, nterms: usize) {
        let mut ix = Index { nterms, ..Default::default() };
        if self.k == 1 {
            ix.dense = vec![None; self.rows.len() * nterms];
        }
        for (s, row) in self.rows.iter().enumerate() {
            for (la, a) in &row.actions {
                if self.k == 1 {
                    ix.dense[s * nterms + la[0] as usize] = Some(*a);
                } else {
                    ix.sparse.insert((s as StateId, la.clone()), *a);
                }
            }
            for &(n, c, t) in &row.gotos {
                ix.gotos.insert((s as StateId, n, c), t);
            }
        }
        self.index = ix;
    }

    pub fn action(&self, state: StateId, la: &[u32]) -> Option<LrAction> {
        if self.k == 1 {
            let t = la[0] as usize;
            if t >= self.index.nterms {
                return None;
            }
            self.index.dense[state as usize * self.index.nterms + t]
        } else {
            self.index.sparse.get(&(state, la.to_vec())).copied()
        }
    }

    pub fn goto(&self, state: StateId, nt: NtId, class: u32) -> Option<StateId> {
        self.index.gotos.get(&(state, nt, class)).copied()
    }

    pub fn start_state(&self, nt: NtId) -> Option<StateId> {
        self.starts.iter().find(|(n, _)| *n == nt).map(|(_, s)| *s)
    }
}
