//! Shortest terminal sentences per slot constraint and per production class,
//! computed on the attribute-filtered grammar (Knuth's generalization of
//! Dijkstra, so reconstruction never loops).

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use crate::grammar::{Cfg, Constraint, NtId, ProdId, Sym};
use crate::lr::LrAutomaton;

pub struct ShortestSentences {
    prod: Vec<Option<Vec<u32>>>,
    key: HashMap<(NtId, Constraint), Vec<u32>>,
    class: HashMap<(NtId, u32), Vec<u32>>,
}

impl ShortestSentences {
    pub fn compute(cfg: &Cfg, lr: &LrAutomaton) -> ShortestSentences {
        let mut keys: BTreeSet<(NtId, Constraint)> = BTreeSet::new();
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
        let keys: Vec<(NtId, Constraint)> = keys.into_iter().collect();
        let key_ix: HashMap<&(NtId, Constraint), usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();

        let np = cfg.prods.len();
        let mut admitted_by: Vec<Vec<usize>> = vec![vec![]; np];
        for (ki, (n, c)) in keys.iter().enumerate() {
            for &p in cfg.prods_of(*n) {
                if c.admits(cfg.prod(p)) {
                    admitted_by[p as usize].push(ki);
                }
            }
        }
        let mut users: Vec<Vec<ProdId>> = vec![vec![]; keys.len()];
        let mut remaining = vec![0usize; np];
        for (p, prod) in cfg.prods.iter().enumerate() {
            let deps: BTreeSet<usize> = prod
                .rhs
                .iter()
                .filter_map(|s| match s.sym {
                    Sym::N(n) => Some(key_ix[&(n, s.constraint())]),
                    Sym::T(_) => None,
                })
                .collect();
            remaining[p] = deps.len();
            for d in deps {
                users[d].push(p as ProdId);
            }
        }

        let mut prod_sent: Vec<Option<Vec<u32>>> = vec![None; np];
        let mut key_sent: Vec<Option<Vec<u32>>> = vec![None; keys.len()];
        let mut best: Vec<Option<(usize, ProdId)>> = vec![None; keys.len()];
        let mut heap = BinaryHeap::new();

        let build = |p: usize, key_sent: &[Option<Vec<u32>>]| -> Vec<u32> {
            let mut out = vec![];
            for s in &cfg.prods[p].rhs {
                match s.sym {
                    Sym::T(t) => out.push(t),
                    Sym::N(n) => out.extend(key_sent[key_ix[&(n, s.constraint())]].as_ref().expect("final")),
                }
            }
            out
        };
        let relax = |p: usize,
                     len: usize,
                     best: &mut Vec<Option<(usize, ProdId)>>,
                     heap: &mut BinaryHeap<Reverse<(usize, ProdId, usize)>>| {
            for &ki in &admitted_by[p] {
                let cand = (len, p as ProdId);
                if best[ki].is_none_or(|b| cand < b) {
                    best[ki] = Some(cand);
                    heap.push(Reverse((len, p as ProdId, ki)));
                }
            }
        };

        for p in 0..np {
            if remaining[p] == 0 {
                let s = build(p, &key_sent);
                relax(p, s.len(), &mut best, &mut heap);
                prod_sent[p] = Some(s);
            }
        }
        while let Some(Reverse((len, p, ki))) = heap.pop() {
            if key_sent[ki].is_some() || best[ki] != Some((len, p)) {
                continue;
            }
            key_sent[ki] = prod_sent[p as usize].clone();
            for &q in &users[ki] {
                let q = q as usize;
                remaining[q] -= 1;
                if remaining[q] == 0 {
                    let s = build(q, &key_sent);
                    relax(q, s.len(), &mut best, &mut heap);
                    prod_sent[q] = Some(s);
                }
            }
        }

        let mut class: HashMap<(NtId, u32), Vec<u32>> = HashMap::new();
        for (p, s) in prod_sent.iter().enumerate() {
            let Some(s) = s else { continue };
            let key = (cfg.prods[p].lhs, lr.prod_class[p]);
            if class.get(&key).is_none_or(|cur| (s.len(), s) < (cur.len(), cur)) {
                class.insert(key, s.clone());
            }
        }
        let key = keys.into_iter().zip(key_sent).filter_map(|(k, s)| s.map(|s| (k, s))).collect();
        ShortestSentences { prod: prod_sent, key, class }
    }

    pub fn prod_sentence(&self, p: ProdId) -> Option<&[u32]> {
        self.prod[p as usize].as_deref()
    }

    pub fn sentence(&self, n: NtId, c: &Constraint) -> Option<&[u32]> {
        self.key.get(&(n, c.clone())).map(|v| v.as_slice())
    }

    /// Shortest sentence of a production of `n` in goto class `cl`.
    pub fn class_sentence(&self, n: NtId, cl: u32) -> Option<&[u32]> {
        self.class.get(&(n, cl)).map(|v| v.as_slice())
    }
}
