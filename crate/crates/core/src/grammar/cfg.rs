use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::lexer::Terminals;

pub type NtId = u32;
pub type ProdId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sym {
    T(u32),
    N(NtId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PrecBound {
    Min(u32),
    /// `pr=*`
    Any,
}

impl PrecBound {
    pub fn admits(self, level: u32) -> bool {
        match self {
            PrecBound::Any => true,
            PrecBound::Min(b) => level >= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub sym: Sym,
    pub field: Option<String>,
    pub attr_reqs: BTreeSet<String>,
    pub prec_bound: PrecBound,
    pub unfold: bool,
}

impl Slot {
    pub fn new(sym: Sym) -> Slot {
        Slot { sym, field: None, attr_reqs: BTreeSet::new(), prec_bound: PrecBound::Min(0), unfold: false }
    }

    pub fn constraint(&self) -> Constraint {
        Constraint { bound: self.prec_bound, reqs: self.attr_reqs.clone() }
    }
}

/// What a nonterminal slot demands of the productions that may fill it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub bound: PrecBound,
    pub reqs: BTreeSet<String>,
}

impl Constraint {
    pub fn any() -> Constraint {
        Constraint { bound: PrecBound::Any, reqs: BTreeSet::new() }
    }

    pub fn admits(&self, p: &Production) -> bool {
        self.bound.admits(p.prec_level.unwrap_or(0)) && self.reqs.is_subset(&p.decl_attrs)
    }

    pub fn admits_class(&self, c: &ProdClass) -> bool {
        self.bound.admits(c.level) && self.reqs.is_subset(&c.attrs)
    }
}

/// The part of a production that admissibility looks at. Goto transitions
/// are keyed by (nonterminal, class) so that a reduction only advances the
/// items whose slot admits it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProdClass {
    pub level: u32,
    pub attrs: BTreeSet<String>,
}

/// How a reduction assembles its value from the popped RHS values.
/// Spans are half-open slot ranges used for source bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Build {
    Slot(u32),
    Node { ty: Vec<String>, span: (u32, u32), fields: Vec<(String, Build)> },
    Label { ty: Vec<String>, label: String, span: (u32, u32) },
    Bool(bool),
    OptNone,
    OptSome(Box<Build>),
    SeqNew(Vec<Build>),
    SeqPush { list: u32, elem: Box<Build> },
    SeqTrailing { list: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Production {
    pub lhs: NtId,
    /// Rule path for declared productions; empty for synthesized ones.
    pub variant: Vec<String>,
    pub rhs: Vec<Slot>,
    pub decl_attrs: BTreeSet<String>,
    pub prec_level: Option<u32>,
    pub build: Build,
}

impl Production {
    pub fn class(&self) -> ProdClass {
        ProdClass { level: self.prec_level.unwrap_or(0), attrs: self.decl_attrs.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NontermInfo {
    pub name: String,
    pub synthesized: bool,
    /// Source rendering of the sugar a synthesized nonterminal stands for.
    pub display: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cfg {
    pub terminals: Terminals,
    pub nonterms: Vec<NontermInfo>,
    pub prods: Vec<Production>,
    /// Parser main nonterminals; the first is the default.
    pub starts: Vec<NtId>,
    pub by_lhs: Vec<Vec<ProdId>>,
}

impl Cfg {
    pub fn nt_name(&self, n: NtId) -> &str {
        &self.nonterms[n as usize].name
    }

    pub fn nt_id(&self, name: &str) -> Option<NtId> {
        self.nonterms.iter().position(|n| n.name == name && !n.synthesized).map(|i| i as NtId)
    }

    pub fn sym_name(&self, s: Sym) -> String {
        match s {
            Sym::T(t) => self.terminals.name(t),
            Sym::N(n) => self.nt_name(n).to_string(),
        }
    }

    pub fn prods_of(&self, n: NtId) -> &[ProdId] {
        &self.by_lhs[n as usize]
    }

    pub fn prod(&self, p: ProdId) -> &Production {
        &self.prods[p as usize]
    }

    /// `Expr -> Expr X0 Expr` style rendering with caller-chosen symbol names.
    pub fn prod_string_with(&self, p: ProdId, name: &dyn Fn(Sym) -> String) -> String {
        let prod = self.prod(p);
        let mut s = format!("{} ->", name(Sym::N(prod.lhs)));
        if prod.rhs.is_empty() {
            s.push_str(" eps");
        }
        for slot in &prod.rhs {
            s.push(' ');
            s.push_str(&name(slot.sym));
        }
        s
    }

    pub fn prod_string(&self, p: ProdId) -> String {
        self.prod_string_with(p, &|s| self.sym_name(s))
    }

    pub fn slot_string(&self, slot: &Slot) -> String {
        let mut s = String::new();
        if slot.unfold {
            s.push('~');
        }
        s.push_str(&self.sym_name(slot.sym));
        let mut ann: Vec<String> = slot.attr_reqs.iter().cloned().collect();
        match slot.prec_bound {
            PrecBound::Any => ann.push("pr=*".into()),
            PrecBound::Min(0) => {}
            PrecBound::Min(b) => ann.push(format!("pr>={b}")),
        }
        if !ann.is_empty() {
            let _ = write!(s, "[{}]", ann.join(", "));
        }
        s
    }

    /// Stable textual form of the lowered grammar.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let starts: Vec<&str> = self.starts.iter().map(|&n| self.nt_name(n)).collect();
        let _ = writeln!(out, "start: {}", starts.join(", "));
        let terms: Vec<String> = self.terminals.iter().map(|(_, t)| t.to_string()).collect();
        let _ = writeln!(out, "terminals: {}", terms.join(" "));
        for (i, p) in self.prods.iter().enumerate() {
            let mut lhs = self.nt_name(p.lhs).to_string();
            if !p.decl_attrs.is_empty() {
                let attrs: Vec<&str> = p.decl_attrs.iter().map(|s| s.as_str()).collect();
                let _ = write!(lhs, "[{}]", attrs.join(", "));
            }
            let rhs: Vec<String> = p.rhs.iter().map(|s| self.slot_string(s)).collect();
            let rhs = if rhs.is_empty() { "eps".to_string() } else { rhs.join(" ") };
            let _ = write!(out, "P{i}: {lhs} -> {rhs}");
            if !p.variant.is_empty() {
                let _ = write!(out, "    # {}", p.variant.join("."));
            }
            if let Some(l) = p.prec_level {
                let _ = write!(out, " level {l}");
            }
            out.push('\n');
        }
        for n in self.nonterms.iter().filter(|n| n.synthesized) {
            if let Some(d) = &n.display {
                let _ = writeln!(out, "{} = {}", n.name, d);
            }
        }
        out
    }
}
