//! Canonical LR(k) construction over attribute-constrained gotos, with an
//! optional conservative recursive-descent variant.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::first::{concat_k, FirstK, FirstSet};
use crate::grammar::{Cfg, Constraint, NtId, ProdClass, ProdId, Sym};
use crate::lexer::Terminals;

pub type StateId = u32;

/// `prod` indexes the augmented production list (`LrAutomaton::gprods`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Item {
    pub prod: u32,
    pub dot: u32,
    pub la: u32,
}

/// Transition label: a terminal, or a nonterminal together with the class of
/// the production that was reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GSym {
    T(u32),
    N(NtId, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LrAction {
    Shift(StateId),
    Reduce(ProdId),
    /// Reduce the augmented production of main nonterminal `i`.
    Accept(u32),
    /// Enter the sub-automaton for `nt` at state `sub`; its `Ret` delivers
    /// the result to the state that recurred.
    Recur { nt: NtId, sub: StateId },
    Ret,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Aug {
    Start(u32),
    /// Sub-automaton entry for a nonterminal under a slot constraint.
    Sub(NtId, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GProd {
    pub aug: Option<Aug>,
    pub lhs: Option<NtId>,
    /// Symbol and interned slot constraint.
    pub rhs: Vec<(Sym, u32)>,
    pub unfold: Vec<bool>,
    pub class: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrState {
    pub kernel: Vec<Item>,
    /// The full closure, kernel included, sorted.
    pub items: Vec<Item>,
    pub trans: BTreeMap<GSym, StateId>,
    /// Keyed by interned lookahead string.
    pub actions: BTreeMap<u32, LrAction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictSite {
    pub state: StateId,
    pub la: u32,
    /// Each competing action with the items that induce it.
    pub actions: Vec<(LrAction, Vec<Item>)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LrOptions {
    pub rd: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrAutomaton {
    pub k: usize,
    pub rd: bool,
    pub gprods: Vec<GProd>,
    pub constraints: Vec<Constraint>,
    pub classes: Vec<ProdClass>,
    /// Class id of each grammar production.
    pub prod_class: Vec<u32>,
    pub lookaheads: Vec<Vec<u32>>,
    pub states: Vec<LrState>,
    /// Start state per main nonterminal, in `Cfg::starts` order.
    pub starts: Vec<StateId>,
    pub conflicts: Vec<ConflictSite>,
    /// RD-related remarks for the user; not errors.
    pub notices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LrBuildError {
    #[error("LR(0) is not supported; use k >= 1")]
    ZeroLookahead,
    #[error("grammar has no main nonterminal")]
    NoStart,
}

pub fn build_lr(cfg: &Cfg, k: usize, opts: LrOptions) -> Result<LrAutomaton, LrBuildError> {
    if k == 0 {
        return Err(LrBuildError::ZeroLookahead);
    }
    if cfg.starts.is_empty() {
        return Err(LrBuildError::NoStart);
    }
    let mut banned = BTreeSet::new();
    let mut notices = Vec::new();
    if !opts.rd && cfg.prods.iter().any(|p| p.rhs.iter().any(|s| matches!(s.sym, Sym::N(_)) && !s.unfold)) {
        notices.push("recursive descent is off: all nonterminal slots are compiled as unfolded".to_string());
    }
    loop {
        let mut b = Builder::new(cfg, k, opts.rd, banned.clone());
        b.run();
        let mut fresh = Vec::new();
        for c in &b.conflicts {
            for (a, items) in &c.actions {
                if *a != LrAction::Ret {
                    continue;
                }
                for it in items {
                    if let Some(Aug::Sub(n, cid)) = b.gprods[it.prod as usize].aug {
                        if banned.insert((n, cid)) {
                            fresh.push((n, cid));
                        }
                    }
                }
            }
        }
        for &(n, cid) in &fresh {
            notices.push(format!(
                "recursive descent into `{}` ({}) conflicts with its continuation; using LR",
                cfg.nt_name(n),
                constraint_string(&b.cons[cid as usize])
            ));
        }
        if fresh.is_empty() {
            let mut a = b.finish();
            a.notices = notices;
            return Ok(a);
        }
    }
}

fn constraint_string(c: &Constraint) -> String {
    let mut parts: Vec<String> = c.reqs.iter().cloned().collect();
    match c.bound {
        crate::grammar::PrecBound::Any => parts.push("pr=*".into()),
        crate::grammar::PrecBound::Min(b) => parts.push(format!("pr>={b}")),
    }
    parts.join(", ")
}

struct Builder<'a> {
    cfg: &'a Cfg,
    k: usize,
    rd: bool,
    banned: BTreeSet<(NtId, u32)>,
    cons: Vec<Constraint>,
    cons_ix: HashMap<Constraint, u32>,
    classes: Vec<ProdClass>,
    classes_of: Vec<Vec<u32>>,
    prod_class: Vec<u32>,
    gprods: Vec<GProd>,
    first: FirstK,
    /// FIRST_k of rhs[dot..] per augmented production.
    suffix: Vec<Vec<FirstSet>>,
    las: Vec<Vec<u32>>,
    la_ix: HashMap<Vec<u32>, u32>,
    admissible: HashMap<(NtId, u32), Vec<u32>>,
    states: Vec<LrState>,
    kernels: HashMap<Vec<Item>, StateId>,
    subs: HashMap<(NtId, u32), u32>,
    starts: Vec<StateId>,
    conflicts: Vec<ConflictSite>,
}

impl<'a> Builder<'a> {
    fn new(cfg: &'a Cfg, k: usize, rd: bool, banned: BTreeSet<(NtId, u32)>) -> Self {
        let first = FirstK::compute(cfg, k, &cfg.starts.iter().map(|&s| (s, Constraint::any())).collect::<Vec<_>>());
        let mut b = Builder {
            cfg,
            k,
            rd,
            banned,
            cons: vec![],
            cons_ix: HashMap::new(),
            classes: vec![],
            classes_of: vec![vec![]; cfg.nonterms.len()],
            prod_class: vec![],
            gprods: vec![],
            first,
            suffix: vec![],
            las: vec![],
            la_ix: HashMap::new(),
            admissible: HashMap::new(),
            states: vec![],
            kernels: HashMap::new(),
            subs: HashMap::new(),
            starts: vec![],
            conflicts: vec![],
        };
        let mut class_ix: HashMap<ProdClass, u32> = HashMap::new();
        for p in &cfg.prods {
            let c = p.class();
            let id = *class_ix.entry(c.clone()).or_insert_with(|| {
                b.classes.push(c);
                (b.classes.len() - 1) as u32
            });
            b.prod_class.push(id);
            let of = &mut b.classes_of[p.lhs as usize];
            if !of.contains(&id) {
                of.push(id);
            }
        }
        for (i, p) in cfg.prods.iter().enumerate() {
            let rhs = p.rhs.iter().map(|s| (s.sym, b.cons_id(s.constraint()))).collect();
            let unfold = p.rhs.iter().map(|s| s.unfold).collect();
            b.push_gprod(GProd { aug: None, lhs: Some(p.lhs), rhs, unfold, class: b.prod_class[i] });
        }
        b
    }

    fn cons_id(&mut self, c: Constraint) -> u32 {
        if let Some(&i) = self.cons_ix.get(&c) {
            return i;
        }
        self.cons.push(c.clone());
        let i = (self.cons.len() - 1) as u32;
        self.cons_ix.insert(c, i);
        i
    }

    fn la_id(&mut self, s: Vec<u32>) -> u32 {
        if let Some(&i) = self.la_ix.get(&s) {
            return i;
        }
        self.las.push(s.clone());
        let i = (self.las.len() - 1) as u32;
        self.la_ix.insert(s, i);
        i
    }

    fn push_gprod(&mut self, g: GProd) -> u32 {
        let mut sets = Vec::with_capacity(g.rhs.len() + 1);
        for dot in 0..=g.rhs.len() {
            let slots: Vec<(Sym, Constraint)> =
                g.rhs[dot..].iter().map(|&(s, c)| (s, self.cons[c as usize].clone())).collect();
            sets.push(self.first.of_slots(slots));
        }
        self.suffix.push(sets);
        self.gprods.push(g);
        (self.gprods.len() - 1) as u32
    }

    fn aug_prod(&mut self, aug: Aug, n: NtId, cid: u32) -> u32 {
        self.push_gprod(GProd { aug: Some(aug), lhs: None, rhs: vec![(Sym::N(n), cid)], unfold: vec![false], class: 0 })
    }

    fn admissible(&mut self, n: NtId, cid: u32) -> Vec<u32> {
        if let Some(v) = self.admissible.get(&(n, cid)) {
            return v.clone();
        }
        let c = &self.cons[cid as usize];
        let v: Vec<u32> =
            self.cfg.prods_of(n).iter().copied().filter(|&p| c.admits(self.cfg.prod(p))).collect();
        self.admissible.insert((n, cid), v.clone());
        v
    }

    /// FIRST_k(rhs[from..] · la) as interned length-k strings.
    fn follow(&mut self, prod: u32, from: u32, la: u32) -> Vec<u32> {
        let tail: FirstSet = [self.las[la as usize].clone()].into_iter().collect();
        let set = concat_k(&self.suffix[prod as usize][from as usize], &tail, self.k);
        set.into_iter().map(|s| self.la_id(s)).collect()
    }

    /// Closure of a kernel; items whose next slot is `skip` are not expanded.
    fn closure(&mut self, kernel: &[Item], skip: Option<(NtId, u32)>) -> Vec<Item> {
        let mut seen: HashSet<Item> = kernel.iter().copied().collect();
        let mut work: Vec<Item> = kernel.to_vec();
        while let Some(it) = work.pop() {
            let g = &self.gprods[it.prod as usize];
            let Some(&(Sym::N(n), cid)) = g.rhs.get(it.dot as usize) else { continue };
            if skip == Some((n, cid)) {
                continue;
            }
            let las = self.follow(it.prod, it.dot + 1, it.la);
            for q in self.admissible(n, cid) {
                for &w in &las {
                    let ni = Item { prod: q, dot: 0, la: w };
                    if seen.insert(ni) {
                        work.push(ni);
                    }
                }
            }
        }
        let mut v: Vec<Item> = seen.into_iter().collect();
        v.sort();
        v
    }

    fn add_state(&mut self, mut kernel: Vec<Item>) -> StateId {
        kernel.sort();
        kernel.dedup();
        if let Some(&s) = self.kernels.get(&kernel) {
            return s;
        }
        let id = self.states.len() as StateId;
        self.kernels.insert(kernel.clone(), id);
        self.states.push(LrState { kernel, ..Default::default() });
        id
    }

    fn run(&mut self) {
        let eof = self.la_id(vec![Terminals::END; self.k]);
        for (i, &s) in self.cfg.starts.clone().iter().enumerate() {
            let any = self.cons_id(Constraint::any());
            let p = self.aug_prod(Aug::Start(i as u32), s, any);
            let st = self.add_state(vec![Item { prod: p, dot: 0, la: eof }]);
            self.starts.push(st);
        }
        let mut next = 0;
        while next < self.states.len() {
            self.expand(next as StateId);
            next += 1;
        }
    }

    fn expand(&mut self, s: StateId) {
        let kernel = self.states[s as usize].kernel.clone();
        let items = self.closure(&kernel, None);

        let mut groups: BTreeMap<GSym, Vec<Item>> = BTreeMap::new();
        for it in &items {
            let g = &self.gprods[it.prod as usize];
            let Some(&(sym, cid)) = g.rhs.get(it.dot as usize) else { continue };
            let adv = Item { dot: it.dot + 1, ..*it };
            match sym {
                Sym::T(t) => groups.entry(GSym::T(t)).or_default().push(adv),
                Sym::N(n) => {
                    for &cl in &self.classes_of[n as usize] {
                        if self.cons[cid as usize].admits_class(&self.classes[cl as usize]) {
                            groups.entry(GSym::N(n, cl)).or_default().push(adv);
                        }
                    }
                }
            }
        }
        let mut trans = BTreeMap::new();
        for (g, k) in groups {
            let t = self.add_state(k);
            trans.insert(g, t);
        }

        let mut acts: BTreeMap<u32, Vec<(LrAction, Item)>> = BTreeMap::new();
        for &it in &items {
            let g = &self.gprods[it.prod as usize];
            match g.rhs.get(it.dot as usize) {
                None => {
                    let a = match g.aug {
                        Some(Aug::Start(i)) => LrAction::Accept(i),
                        Some(Aug::Sub(..)) => LrAction::Ret,
                        None => LrAction::Reduce(it.prod),
                    };
                    acts.entry(it.la).or_default().push((a, it));
                }
                Some(&(Sym::T(t), _)) => {
                    let target = trans[&GSym::T(t)];
                    for w in self.follow(it.prod, it.dot, it.la) {
                        acts.entry(w).or_default().push((LrAction::Shift(target), it));
                    }
                }
                Some(_) => {}
            }
        }

        if self.rd {
            let mut cache = HashMap::new();
            for (w, acting) in acts.iter_mut() {
                if let Some((nt, sub)) = self.recur_target(&kernel, &items, acting, &mut cache) {
                    let its = acting.iter().map(|(_, it)| *it).collect::<Vec<_>>();
                    *acting = its.into_iter().map(|it| (LrAction::Recur { nt, sub }, it)).collect();
                    let _ = w;
                }
            }
        }

        let mut actions = BTreeMap::new();
        for (w, acting) in acts {
            let mut by: BTreeMap<LrAction, Vec<Item>> = BTreeMap::new();
            for (a, it) in acting {
                by.entry(a).or_default().push(it);
            }
            let first = *by.keys().next().expect("nonempty");
            actions.insert(w, first);
            if by.len() > 1 {
                self.conflicts.push(ConflictSite { state: s, la: w, actions: by.into_iter().collect() });
            }
        }
        let st = &mut self.states[s as usize];
        st.items = items;
        st.trans = trans;
        st.actions = actions;
    }

    /// A lookahead may enter a sub-automaton for `N` when every item acting
    /// on it is a prediction of that `N` slot and of nothing else in the state.
    fn recur_target(
        &mut self,
        kernel: &[Item],
        items: &[Item],
        acting: &[(LrAction, Item)],
        cache: &mut HashMap<(NtId, u32), Option<(HashSet<Item>, HashSet<Item>, Vec<Item>)>>,
    ) -> Option<(NtId, StateId)> {
        let mut groups: BTreeMap<(NtId, u32), bool> = BTreeMap::new();
        for it in items {
            let g = &self.gprods[it.prod as usize];
            if g.aug.is_some() {
                continue;
            }
            if let Some(&(Sym::N(n), cid)) = g.rhs.get(it.dot as usize) {
                let ok = groups.entry((n, cid)).or_insert(true);
                *ok &= !g.unfold[it.dot as usize];
            }
        }
        for ((n, cid), ok) in groups {
            if !ok || self.banned.contains(&(n, cid)) {
                continue;
            }
            if !cache.contains_key(&(n, cid)) {
                let entry = self.group_sets(kernel, items, n, cid);
                cache.insert((n, cid), entry);
            }
            let Some((s_n, s_other, sub_kernel)) = &cache[&(n, cid)] else { continue };
            if acting.iter().all(|(_, it)| s_n.contains(it) && !s_other.contains(it)) {
                let sub = self.add_state(sub_kernel.clone());
                return Some((n, sub));
            }
        }
        None
    }

    #[allow(clippy::type_complexity)]
    fn group_sets(
        &mut self,
        kernel: &[Item],
        items: &[Item],
        n: NtId,
        cid: u32,
    ) -> Option<(HashSet<Item>, HashSet<Item>, Vec<Item>)> {
        let mut ret_las = BTreeSet::new();
        for it in items {
            let g = &self.gprods[it.prod as usize];
            if g.rhs.get(it.dot as usize) == Some(&(Sym::N(n), cid)) {
                ret_las.extend(self.follow(it.prod, it.dot + 1, it.la));
            }
        }
        let p = match self.subs.get(&(n, cid)) {
            Some(&p) => p,
            None => {
                let p = self.aug_prod(Aug::Sub(n, cid), n, cid);
                self.subs.insert((n, cid), p);
                p
            }
        };
        let sub_kernel: Vec<Item> = ret_las.into_iter().map(|la| Item { prod: p, dot: 0, la }).collect();
        let s_n: HashSet<Item> = self.closure(&sub_kernel, None).into_iter().collect();
        let s_other: HashSet<Item> = self.closure(kernel, Some((n, cid))).into_iter().collect();
        Some((s_n, s_other, sub_kernel))
    }

    fn finish(self) -> LrAutomaton {
        LrAutomaton {
            k: self.k,
            rd: self.rd,
            gprods: self.gprods,
            constraints: self.cons,
            classes: self.classes,
            prod_class: self.prod_class,
            lookaheads: self.las,
            states: self.states,
            starts: self.starts,
            conflicts: self.conflicts,
            notices: vec![],
        }
    }
}

impl LrAutomaton {
    pub fn la_string(&self, cfg: &Cfg, la: u32) -> String {
        let v: Vec<String> = self.lookaheads[la as usize].iter().map(|&t| cfg.terminals.name(t)).collect();
        v.join(" ")
    }

    pub fn gsym_string(&self, cfg: &Cfg, g: GSym) -> String {
        match g {
            GSym::T(t) => cfg.terminals.name(t),
            GSym::N(n, cl) => {
                let c = &self.classes[cl as usize];
                let mut s = format!("{}<{}", cfg.nt_name(n), c.level);
                for a in &c.attrs {
                    let _ = write!(s, ",{a}");
                }
                s.push('>');
                s
            }
        }
    }

    /// `Expr -> Expr . X0 Expr` with `&Expr` for augmented heads.
    pub fn item_string(&self, cfg: &Cfg, it: &Item, name: &dyn Fn(Sym) -> String) -> String {
        let g = &self.gprods[it.prod as usize];
        let head = match (g.aug, g.lhs) {
            (_, Some(n)) => name(Sym::N(n)),
            (Some(_), None) => format!("&{}", name(g.rhs[0].0)),
            (None, None) => unreachable!("production without head"),
        };
        let mut s = format!("{head} ->");
        for (i, (sym, _)) in g.rhs.iter().enumerate() {
            if i as u32 == it.dot {
                s.push_str(" .");
            }
            s.push(' ');
            s.push_str(&name(*sym));
        }
        if it.dot as usize == g.rhs.len() {
            s.push_str(" .");
        }
        let _ = write!(s, ", {}", self.la_string(cfg, it.la));
        s
    }

    pub fn action_string(&self, cfg: &Cfg, a: &LrAction) -> String {
        match a {
            LrAction::Shift(s) => format!("shift {s}"),
            LrAction::Reduce(p) => format!("reduce {}", cfg.prod_string(*p)),
            LrAction::Accept(i) => format!("accept {}", cfg.nt_name(cfg.starts[*i as usize])),
            LrAction::Recur { nt, sub } => format!("recur {} {}", cfg.nt_name(*nt), sub),
            LrAction::Ret => "ret".into(),
        }
    }

    /// Stable listing of every state: items, transitions and actions.
    pub fn dump(&self, cfg: &Cfg) -> String {
        let name = |s: Sym| cfg.sym_name(s);
        let mut out = String::new();
        let _ = writeln!(out, "LR({}) states: {}", self.k, self.states.len());
        for (i, st) in self.states.iter().enumerate() {
            let _ = writeln!(out, "state {i}:");
            for it in &st.items {
                let mark = if st.kernel.contains(it) { "*" } else { " " };
                let _ = writeln!(out, "  {mark}[{}]", self.item_string(cfg, it, &name));
            }
            for (g, t) in &st.trans {
                let _ = writeln!(out, "  goto {} -> {t}", self.gsym_string(cfg, *g));
            }
            for (la, a) in &st.actions {
                let _ = writeln!(out, "  on {}: {}", self.la_string(cfg, *la), self.action_string(cfg, a));
            }
        }
        out
    }
}
