//! FIRST_k sets over the attribute-filtered grammar.

use std::collections::{BTreeSet, HashMap};

use crate::grammar::{Cfg, Constraint, NtId, Sym};

pub type TermString = Vec<u32>;
pub type FirstSet = BTreeSet<TermString>;

/// `a ⊕k b`: all concatenations truncated to length k.
pub fn concat_k(a: &FirstSet, b: &FirstSet, k: usize) -> FirstSet {
    let mut out = FirstSet::new();
    for x in a {
        if x.len() >= k {
            out.insert(x[..k].to_vec());
            continue;
        }
        for y in b {
            let mut s = x.clone();
            s.extend(y.iter().take(k - x.len()));
            out.insert(s);
        }
    }
    out
}

/// Fixpoint FIRST_k per (nonterminal, constraint); only productions the
/// constraint admits contribute.
pub struct FirstK {
    pub k: usize,
    map: HashMap<(NtId, Constraint), FirstSet>,
}

impl FirstK {
    pub fn compute(cfg: &Cfg, k: usize, extra: &[(NtId, Constraint)]) -> FirstK {
        let mut keys: BTreeSet<(NtId, Constraint)> = extra.iter().cloned().collect();
        for p in &cfg.prods {
            for s in &p.rhs {
                if let Sym::N(n) = s.sym {
                    keys.insert((n, s.constraint()));
                }
            }
        }
        let keys: Vec<(NtId, Constraint)> = keys.into_iter().collect();
        let mut f = FirstK { k, map: keys.iter().map(|key| (key.clone(), FirstSet::new())).collect() };
        loop {
            let mut changed = false;
            for key in &keys {
                let mut acc = FirstSet::new();
                for &p in cfg.prods_of(key.0) {
                    let prod = cfg.prod(p);
                    if key.1.admits(prod) {
                        acc.extend(f.of_slots(prod.rhs.iter().map(|s| (s.sym, s.constraint()))));
                    }
                }
                let cur = f.map.get_mut(key).expect("key");
                if acc.len() != cur.len() {
                    *cur = acc;
                    changed = true;
                }
            }
            if !changed {
                return f;
            }
        }
    }

    pub fn of_nonterm(&self, n: NtId, c: &Constraint) -> &FirstSet {
        &self.map[&(n, c.clone())]
    }

    /// FIRST_k of a symbol sequence; strings shorter than k are complete yields.
    pub fn of_slots(&self, slots: impl IntoIterator<Item = (Sym, Constraint)>) -> FirstSet {
        let mut acc: FirstSet = [vec![]].into_iter().collect();
        for (sym, c) in slots {
            if acc.iter().all(|s| s.len() >= self.k) {
                break;
            }
            let next = match sym {
                Sym::T(t) => [vec![t]].into_iter().collect(),
                Sym::N(n) => match self.map.get(&(n, c)) {
                    Some(s) => s.clone(),
                    None => FirstSet::new(),
                },
            };
            acc = concat_k(&acc, &next, self.k);
        }
        acc
    }
}
