//! Brute-force recognizer on the attribute-filtered grammar: a fixpoint over
//! (nonterminal, constraint, span) with no reference to the LR machinery.
//! Included by both unit and integration tests; `crate::grammar` must resolve.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use crate::grammar::{Cfg, Constraint, NtId, ProdClass, Sym};

pub struct Recognizer<'a> {
    cfg: &'a Cfg,
    keys: Vec<(NtId, Constraint)>,
    key_ix: HashMap<(NtId, Constraint), usize>,
}

impl<'a> Recognizer<'a> {
    pub fn new(cfg: &'a Cfg) -> Self {
        let mut keys = BTreeSet::new();
        for p in &cfg.prods {
            for s in &p.rhs {
                if let Sym::N(n) = s.sym {
                    keys.insert((n, s.constraint()));
                }
            }
        }
        for &s in &cfg.starts {
            keys.insert((s, Constraint::any()));
        }
        let keys: Vec<_> = keys.into_iter().collect();
        let key_ix = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Recognizer { cfg, keys, key_ix }
    }

    fn table(&self, toks: &[u32]) -> Vec<Vec<Vec<bool>>> {
        let n = toks.len();
        let mut d = vec![vec![vec![false; n + 1]; n + 1]; self.keys.len()];
        loop {
            let mut changed = false;
            for (ki, (nt, c)) in self.keys.iter().enumerate() {
                for &p in self.cfg.prods_of(*nt) {
                    let prod = self.cfg.prod(p);
                    if !c.admits(prod) {
                        continue;
                    }
                    for i in 0..=n {
                        let mut at: BTreeSet<usize> = [i].into_iter().collect();
                        for s in &prod.rhs {
                            let mut next = BTreeSet::new();
                            for &pos in &at {
                                match s.sym {
                                    Sym::T(t) => {
                                        if pos < n && toks[pos] == t {
                                            next.insert(pos + 1);
                                        }
                                    }
                                    Sym::N(m) => {
                                        let k = self.key_ix[&(m, s.constraint())];
                                        for j in pos..=n {
                                            if d[k][pos][j] {
                                                next.insert(j);
                                            }
                                        }
                                    }
                                }
                            }
                            at = next;
                        }
                        for j in at {
                            if !d[ki][i][j] {
                                d[ki][i][j] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                return d;
            }
        }
    }

    /// Whether `toks` is a sentence of main nonterminal `start`.
    pub fn accepts(&self, start: NtId, toks: &[u32]) -> bool {
        let d = self.table(toks);
        d[self.key_ix[&(start, Constraint::any())]][0][toks.len()]
    }

    /// Whether `toks` derives from `n` restricted to productions of class `cl`.
    pub fn derives_class(&self, n: NtId, class: &ProdClass, toks: &[u32]) -> bool {
        let d = self.table(toks);
        let m = toks.len();
        self.cfg.prods_of(n).iter().any(|&p| {
            let prod = self.cfg.prod(p);
            if prod.class() != *class {
                return false;
            }
            let mut at: BTreeSet<usize> = [0].into_iter().collect();
            for s in &prod.rhs {
                let mut next = BTreeSet::new();
                for &pos in &at {
                    match s.sym {
                        Sym::T(t) => {
                            if pos < m && toks[pos] == t {
                                next.insert(pos + 1);
                            }
                        }
                        Sym::N(q) => {
                            let k = self.key_ix[&(q, s.constraint())];
                            for j in pos..=m {
                                if d[k][pos][j] {
                                    next.insert(j);
                                }
                            }
                        }
                    }
                }
                at = next;
            }
            at.contains(&m)
        })
    }
}
