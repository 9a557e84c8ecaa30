//! Desugaring of parser rules into a plain attribute-constrained CFG, with
//! the AST schema and print templates derived along the way.

use std::collections::{BTreeMap, BTreeSet};

use super::cfg::*;
use super::template::{Fmt, PrintTemplates, Tpl};
use crate::datacc::{Case, DataType, DatatypeSchema, Field, TypeDef, TypeExpr};
use crate::lexer::{Terminal, Terminals};
use crate::meta::render::render_parse_expr;
use crate::meta::{Assoc, Diagnostic, Diagnostics, LangSpec, ListFlavor, Loc, ParseExpr, RuleDecl, Trailing};

pub const UNIT_TYPE: &str = "Unit";
pub const DEFAULT_INDENT: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lowered {
    pub cfg: Cfg,
    pub schema: DatatypeSchema,
    pub templates: PrintTemplates,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Token,
    Node(String),
    Seq(Box<Kind>),
    Opt(Box<Kind>),
    Bool,
    Type(String),
}

impl Kind {
    fn type_expr(&self) -> TypeExpr {
        match self {
            Kind::Token => TypeExpr::Str,
            Kind::Node(n) | Kind::Type(n) => TypeExpr::named(n),
            Kind::Seq(k) => TypeExpr::seq(k.type_expr()),
            Kind::Opt(k) => TypeExpr::option(k.type_expr()),
            Kind::Bool => TypeExpr::Boolean,
        }
    }
}

struct Val {
    name: Option<String>,
    build: Build,
    kind: Kind,
    fmt: Fmt,
    src: String,
}

enum Piece {
    Tpl(Tpl),
    Val(Val),
}

enum Shape {
    Unit,
    Single(Build, Kind),
    Record(Vec<(String, Build, Kind)>),
}

struct RuleCtx {
    path: Vec<String>,
    lhs: String,
    loc: Loc,
    level: Option<u32>,
    max_level: u32,
    synth_count: usize,
    direct_self: Vec<usize>,
}

struct Lowerer<'a> {
    spec: &'a LangSpec,
    name_strict: bool,
    terminals: Terminals,
    nonterms: Vec<NontermInfo>,
    nt_ids: BTreeMap<String, NtId>,
    prods: Vec<Production>,
    types: BTreeMap<String, DataType>,
    templates: BTreeMap<String, Vec<Tpl>>,
    diags: Vec<Diagnostic>,
    /// nonterminal -> (rule path -> (level, assoc)), max level
    prec: BTreeMap<String, (BTreeMap<Vec<String>, (u32, Option<Assoc>)>, u32)>,
    attrs: BTreeMap<Vec<String>, BTreeSet<String>>,
    ctx: RuleCtx,
}

/// Lowers a validated spec against the terminal numbering produced by the
/// lexer compiler.
pub fn lower_grammar(spec: &LangSpec, terminals: &Terminals) -> Result<Lowered, Diagnostics> {
    let mut lw = Lowerer {
        spec,
        name_strict: spec.has_prop("name_strict"),
        terminals: terminals.clone(),
        nonterms: Vec::new(),
        nt_ids: BTreeMap::new(),
        prods: Vec::new(),
        types: BTreeMap::new(),
        templates: BTreeMap::new(),
        diags: Vec::new(),
        prec: BTreeMap::new(),
        attrs: BTreeMap::new(),
        ctx: RuleCtx {
            path: vec![],
            lhs: String::new(),
            loc: Loc::default(),
            level: None,
            max_level: 0,
            synth_count: 0,
            direct_self: vec![],
        },
    };
    lw.run();
    if lw.diags.is_empty() {
        let mut by_lhs = vec![Vec::new(); lw.nonterms.len()];
        for (i, p) in lw.prods.iter().enumerate() {
            by_lhs[p.lhs as usize].push(i as ProdId);
        }
        let starts = spec.parser.main_nonterms.iter().map(|n| lw.nt_ids[n]).collect();
        Ok(Lowered {
            cfg: Cfg { terminals: lw.terminals, nonterms: lw.nonterms, prods: lw.prods, starts, by_lhs },
            schema: DatatypeSchema { types: lw.types },
            templates: PrintTemplates { by_type: lw.templates, indent_unit: DEFAULT_INDENT },
        })
    } else {
        Err(Diagnostics(lw.diags))
    }
}

fn shift(b: &Build, off: u32) -> Build {
    match b {
        Build::Slot(i) => Build::Slot(i + off),
        Build::Node { ty, span, fields } => Build::Node {
            ty: ty.clone(),
            span: (span.0 + off, span.1 + off),
            fields: fields.iter().map(|(n, f)| (n.clone(), shift(f, off))).collect(),
        },
        Build::Label { ty, label, span } => {
            Build::Label { ty: ty.clone(), label: label.clone(), span: (span.0 + off, span.1 + off) }
        }
        Build::OptSome(x) => Build::OptSome(Box::new(shift(x, off))),
        Build::SeqNew(xs) => Build::SeqNew(xs.iter().map(|x| shift(x, off)).collect()),
        Build::SeqPush { list, elem } => Build::SeqPush { list: list + off, elem: Box::new(shift(elem, off)) },
        Build::SeqTrailing { list } => Build::SeqTrailing { list: list + off },
        Build::Bool(_) | Build::OptNone => b.clone(),
    }
}

fn strip_names(e: &ParseExpr) -> ParseExpr {
    let s = |x: &ParseExpr| Box::new(strip_names(x));
    match e {
        ParseExpr::Named(_, x) => strip_names(x),
        ParseExpr::Seq(xs) => ParseExpr::Seq(xs.iter().map(strip_names).collect()),
        ParseExpr::AltBranches(bs) => ParseExpr::AltBranches(bs.iter().map(|(_, x)| (None, strip_names(x))).collect()),
        ParseExpr::SingletonAlt(_, x) => ParseExpr::SingletonAlt(None, s(x)),
        ParseExpr::Star(x) => ParseExpr::Star(s(x)),
        ParseExpr::Plus(x) => ParseExpr::Plus(s(x)),
        ParseExpr::Optional(x) => ParseExpr::Optional(s(x)),
        ParseExpr::Unfold(x) => ParseExpr::Unfold(s(x)),
        ParseExpr::ListExpr { flavor, elem, min, delim, trailing } => ParseExpr::ListExpr {
            flavor: *flavor,
            elem: s(elem),
            min: *min,
            delim: s(delim),
            trailing: *trailing,
        },
        other => other.clone(),
    }
}

fn display_of(e: &ParseExpr) -> String {
    let r = render_parse_expr(&strip_names(e));
    match e {
        ParseExpr::AltBranches(_) => format!("({r})"),
        _ => r,
    }
}

impl<'a> Lowerer<'a> {
    fn err(&mut self, msg: impl Into<String>) {
        self.diags.push(Diagnostic::new(self.ctx.loc, msg));
    }

    fn run(&mut self) {
        let spec = self.spec;
        for r in &spec.parser.rules {
            if !self.nt_ids.contains_key(r.nonterm()) {
                let id = self.nonterms.len() as NtId;
                self.nt_ids.insert(r.nonterm().to_string(), id);
                self.nonterms.push(NontermInfo { name: r.nonterm().to_string(), synthesized: false, display: None });
            }
            self.attrs.entry(r.path.clone()).or_default().extend(r.lhs_attrs.iter().cloned());
        }
        for a in &spec.parser.attr_decls {
            self.attrs.entry(a.rule.clone()).or_default().extend(a.attrs.iter().cloned());
        }
        let mut lines_by_nt: BTreeMap<String, Vec<&crate::meta::PrecLine>> = BTreeMap::new();
        for l in &spec.parser.prec_lines {
            if let Some(first) = l.rules.first() {
                lines_by_nt.entry(first[0].clone()).or_default().push(l);
            }
        }
        for (nt, lines) in lines_by_nt {
            let mut map = BTreeMap::new();
            for (i, l) in lines.iter().enumerate() {
                for p in &l.rules {
                    map.insert(p.clone(), (i as u32, l.assoc));
                }
            }
            self.prec.insert(nt, (map, lines.len() as u32 - 1));
        }

        let mut rule_fields: BTreeMap<String, Vec<(Vec<String>, Vec<Field>)>> = BTreeMap::new();
        for r in &spec.parser.rules {
            let fields = self.lower_rule(r);
            rule_fields.entry(r.nonterm().to_string()).or_default().push((r.path[1..].to_vec(), fields));
        }
        for (nt, entries) in rule_fields {
            let def = if entries.len() == 1 && entries[0].0.is_empty() {
                TypeDef::Product(entries[0].1.clone())
            } else {
                build_sum(&entries).normalize()
            };
            self.register_type(&nt, def);
        }
        self.check_attr_reqs();
    }

    fn check_attr_reqs(&mut self) {
        let mut declared: BTreeMap<NtId, BTreeSet<String>> = BTreeMap::new();
        for p in &self.prods {
            declared.entry(p.lhs).or_default().extend(p.decl_attrs.iter().cloned());
        }
        let mut errs = Vec::new();
        for p in &self.prods {
            for s in &p.rhs {
                if let Sym::N(n) = s.sym {
                    for a in &s.attr_reqs {
                        if !declared.get(&n).is_some_and(|d| d.contains(a)) {
                            errs.push(format!(
                                "attribute `{a}` is required on `{}` but no rule of `{}` declares it",
                                self.nonterms[n as usize].name, self.nonterms[n as usize].name
                            ));
                        }
                    }
                }
            }
        }
        errs.sort();
        errs.dedup();
        for e in errs {
            self.diags.push(Diagnostic::new(Loc::default(), e));
        }
    }

    fn register_type(&mut self, name: &str, def: TypeDef) {
        let dt = DataType { name: name.to_string(), params: vec![], def };
        match self.types.get(name) {
            Some(existing) if *existing != dt => self.err(format!("AST type name collision on `{name}`")),
            _ => {
                self.types.insert(name.to_string(), dt);
            }
        }
    }

    fn register_template(&mut self, key: String, tpl: Vec<Tpl>) {
        self.templates.insert(key, tpl);
    }

    fn lower_rule(&mut self, r: &RuleDecl) -> Vec<Field> {
        let lhs = r.nonterm().to_string();
        let (level, max_level) = match self.prec.get(&lhs) {
            Some((map, max)) => (Some(map.get(&r.path).map(|x| x.0).unwrap_or(*max)), *max),
            None => (None, 0),
        };
        self.ctx = RuleCtx {
            path: r.path.clone(),
            lhs: lhs.clone(),
            loc: r.loc,
            level,
            max_level,
            synth_count: 0,
            direct_self: vec![],
        };
        let hint = r.path.join("_");
        let mut slots = Vec::new();
        let mut pieces = Vec::new();
        self.lower_elem(&r.rhs, &mut slots, &mut pieces, &hint, true);
        let (shape, tpl) = self.assemble(pieces, true);
        let fields = match shape {
            Shape::Record(fs) => fs,
            _ => vec![],
        };
        self.register_template(r.path.join("."), tpl);

        if let Some(level) = level {
            let assoc = self.prec[&lhs].0.get(&r.path).and_then(|x| x.1);
            let up = (level + 1).min(max_level);
            let idxs = std::mem::take(&mut self.ctx.direct_self);
            let tight = match assoc {
                Some(Assoc::Left) | Some(Assoc::Postfix) => idxs.first().copied(),
                Some(Assoc::Right) | Some(Assoc::Prefix) => idxs.last().copied(),
                None => None,
            };
            for i in idxs {
                slots[i].prec_bound = PrecBound::Min(if Some(i) == tight { level } else { up });
            }
        }
        let n = slots.len() as u32;
        let build = Build::Node {
            ty: r.path.clone(),
            span: (0, n),
            fields: fields.iter().map(|(name, b, _)| (name.clone(), b.clone())).collect(),
        };
        let decl_attrs = self.attrs.get(&r.path).cloned().unwrap_or_default();
        self.prods.push(Production {
            lhs: self.nt_ids[&lhs],
            variant: r.path.clone(),
            rhs: slots,
            decl_attrs,
            prec_level: level,
            build,
        });
        fields.into_iter().map(|(name, _, k)| Field { name, ty: k.type_expr() }).collect()
    }

    fn new_synth(&mut self, display: Option<String>) -> NtId {
        let name = format!("{}@{}", self.ctx.path.join("."), self.ctx.synth_count);
        self.ctx.synth_count += 1;
        let id = self.nonterms.len() as NtId;
        self.nonterms.push(NontermInfo { name, synthesized: true, display });
        id
    }

    fn helper_nt(&mut self, base: NtId) -> NtId {
        let name = format!("{}:1", self.nonterms[base as usize].name);
        let id = self.nonterms.len() as NtId;
        self.nonterms.push(NontermInfo { name, synthesized: true, display: None });
        id
    }

    fn add_prod(&mut self, lhs: NtId, rhs: Vec<Slot>, build: Build) {
        self.prods.push(Production { lhs, variant: vec![], rhs, decl_attrs: BTreeSet::new(), prec_level: None, build });
    }

    fn nt_slot(&mut self, name: &str, attrs: &[String], prec_any: bool, direct: bool, slots: &mut Vec<Slot>) {
        let mut slot = Slot::new(Sym::N(self.nt_ids[name]));
        slot.attr_reqs = attrs.iter().cloned().collect();
        if prec_any {
            slot.prec_bound = PrecBound::Any;
        } else if name == self.ctx.lhs {
            if let Some(level) = self.ctx.level {
                if direct {
                    self.ctx.direct_self.push(slots.len());
                } else {
                    slot.prec_bound = PrecBound::Min((level + 1).min(self.ctx.max_level));
                }
            }
        }
        slots.push(slot);
    }

    fn lower_elem(&mut self, e: &ParseExpr, slots: &mut Vec<Slot>, pieces: &mut Vec<Piece>, hint: &str, direct: bool) {
        let nvals = pieces.iter().filter(|p| matches!(p, Piece::Val(_))).count();
        let vhint = format!("{hint}__f{nvals}");
        let src = render_parse_expr(e);
        match e {
            ParseExpr::TermLiteral(s) => {
                let id = self.literal(s);
                slots.push(Slot::new(Sym::T(id)));
                pieces.push(Piece::Tpl(Tpl::Text(s.clone())));
            }
            ParseExpr::TokenRef(n) => {
                let id = self.terminals.id(&Terminal::Opaque(n.clone())).unwrap_or(Terminals::END);
                slots.push(Slot::new(Sym::T(id)));
                pieces.push(Piece::Val(Val {
                    name: None,
                    build: Build::Slot(slots.len() as u32 - 1),
                    kind: Kind::Token,
                    fmt: Fmt::Token,
                    src,
                }));
            }
            ParseExpr::NontermRef { name, attrs, prec_any } => {
                self.nt_slot(name, attrs, *prec_any, direct, slots);
                pieces.push(Piece::Val(Val {
                    name: None,
                    build: Build::Slot(slots.len() as u32 - 1),
                    kind: Kind::Node(name.clone()),
                    fmt: Fmt::Node,
                    src,
                }));
            }
            ParseExpr::Unfold(x) => {
                self.lower_elem(x, slots, pieces, hint, direct);
                if let Some(s) = slots.last_mut() {
                    s.unfold = true;
                }
            }
            ParseExpr::Named(n, x) => {
                let start = slots.len();
                if let Some((build, kind, fmt)) = self.lower_value(x, slots, &format!("{hint}_{n}"), direct) {
                    if slots.len() == start + 1 {
                        slots[start].field = Some(n.clone());
                    }
                    pieces.push(Piece::Val(Val { name: Some(n.clone()), build, kind, fmt, src }));
                }
            }
            ParseExpr::Seq(xs) => {
                for x in xs {
                    self.lower_elem(x, slots, pieces, hint, direct);
                }
            }
            ParseExpr::PassString(s) => pieces.push(Piece::Tpl(Tpl::Verbatim(s.clone()))),
            ParseExpr::SpaceShorthand => pieces.push(Piece::Tpl(Tpl::Verbatim(" ".into()))),
            ParseExpr::Eps => {}
            ParseExpr::Optional(_)
            | ParseExpr::Star(_)
            | ParseExpr::Plus(_)
            | ParseExpr::ListExpr { .. }
            | ParseExpr::AltBranches(_)
            | ParseExpr::SingletonAlt(..) => {
                let (nt, kind, fmt) = self.lower_sugar(e, &vhint);
                slots.push(Slot::new(Sym::N(nt)));
                pieces.push(Piece::Val(Val {
                    name: None,
                    build: Build::Slot(slots.len() as u32 - 1),
                    kind,
                    fmt,
                    src,
                }));
            }
        }
    }

    /// Lowers the operand of `name:...`; returns its value description.
    fn lower_value(
        &mut self,
        e: &ParseExpr,
        slots: &mut Vec<Slot>,
        hint: &str,
        direct: bool,
    ) -> Option<(Build, Kind, Fmt)> {
        match e {
            ParseExpr::TermLiteral(s) => {
                let id = self.literal(s);
                slots.push(Slot::new(Sym::T(id)));
                Some((Build::Slot(slots.len() as u32 - 1), Kind::Token, Fmt::Token))
            }
            ParseExpr::Seq(_) | ParseExpr::Named(..) | ParseExpr::PassString(_) | ParseExpr::SpaceShorthand | ParseExpr::Eps => {
                let start = slots.len() as u32;
                let mut pieces = Vec::new();
                self.lower_elem(e, slots, &mut pieces, hint, direct);
                let end = slots.len() as u32;
                let (shape, tpl) = self.assemble(pieces, false);
                match shape {
                    Shape::Unit => {
                        self.err(format!("named expression `{}` carries no content", render_parse_expr(e)));
                        None
                    }
                    Shape::Single(b, k) => Some((b, k, Fmt::Inline(tpl))),
                    Shape::Record(fields) => Some(self.record(hint, vec![hint.to_string()], (start, end), fields, tpl)),
                }
            }
            _ => {
                let mut pieces = Vec::new();
                self.lower_elem_named(e, slots, &mut pieces, hint, direct);
                match pieces.into_iter().find_map(|p| match p {
                    Piece::Val(v) => Some(v),
                    Piece::Tpl(_) => None,
                }) {
                    Some(v) => Some((v.build, v.kind, v.fmt)),
                    None => {
                        self.err(format!("named expression `{}` carries no content", render_parse_expr(e)));
                        None
                    }
                }
            }
        }
    }

    /// Like [`Self::lower_elem`] but sugar types are named after `hint` itself.
    fn lower_elem_named(
        &mut self,
        e: &ParseExpr,
        slots: &mut Vec<Slot>,
        pieces: &mut Vec<Piece>,
        hint: &str,
        direct: bool,
    ) {
        match e {
            ParseExpr::Optional(_)
            | ParseExpr::Star(_)
            | ParseExpr::Plus(_)
            | ParseExpr::ListExpr { .. }
            | ParseExpr::AltBranches(_)
            | ParseExpr::SingletonAlt(..) => {
                let (nt, kind, fmt) = self.lower_sugar(e, hint);
                slots.push(Slot::new(Sym::N(nt)));
                pieces.push(Piece::Val(Val {
                    name: None,
                    build: Build::Slot(slots.len() as u32 - 1),
                    kind,
                    fmt,
                    src: render_parse_expr(e),
                }));
            }
            _ => self.lower_elem(e, slots, pieces, hint, direct),
        }
    }

    fn record(
        &mut self,
        type_name: &str,
        ty: Vec<String>,
        span: (u32, u32),
        fields: Vec<(String, Build, Kind)>,
        tpl: Vec<Tpl>,
    ) -> (Build, Kind, Fmt) {
        let def = TypeDef::Product(fields.iter().map(|(n, _, k)| Field { name: n.clone(), ty: k.type_expr() }).collect());
        self.register_type(type_name, def);
        self.register_template(ty.join("."), tpl);
        let build = Build::Node { ty, span, fields: fields.into_iter().map(|(n, b, _)| (n, b)).collect() };
        (build, Kind::Type(type_name.to_string()), Fmt::Node)
    }

    fn literal(&mut self, s: &str) -> u32 {
        match self.terminals.id(&Terminal::Literal(s.to_string())) {
            Some(id) => id,
            None => {
                self.err(format!("literal `{s}` is never emitted by the lexer"));
                Terminals::END
            }
        }
    }

    /// Turns a block's pieces into a value shape and a template.
    fn assemble(&mut self, pieces: Vec<Piece>, force_record: bool) -> (Shape, Vec<Tpl>) {
        let nvals = pieces.iter().filter(|p| matches!(p, Piece::Val(_))).count();
        let single = nvals == 1
            && !force_record
            && pieces.iter().any(|p| matches!(p, Piece::Val(v) if v.name.is_none()));
        let mut tpl = Vec::new();
        if nvals == 0 {
            for p in pieces {
                if let Piece::Tpl(t) = p {
                    tpl.push(t);
                }
            }
            return (Shape::Unit, tpl);
        }
        if single {
            let mut out = None;
            for p in pieces {
                match p {
                    Piece::Tpl(t) => tpl.push(t),
                    Piece::Val(v) => {
                        tpl.push(Tpl::Value(v.fmt));
                        out = Some((v.build, v.kind));
                    }
                }
            }
            let (b, k) = out.expect("one value");
            return (Shape::Single(b, k), tpl);
        }
        let mut fields = Vec::new();
        let mut seen = BTreeSet::new();
        let mut idx = 0;
        for p in pieces {
            match p {
                Piece::Tpl(t) => tpl.push(t),
                Piece::Val(v) => {
                    let name = match v.name {
                        Some(n) => n,
                        None => {
                            if self.name_strict {
                                self.err(format!(
                                    "name_strict violation in `{}`: unnamed subexpression `{}`",
                                    self.ctx.path.join("."),
                                    v.src
                                ));
                            }
                            format!("_f{idx}")
                        }
                    };
                    if !seen.insert(name.clone()) {
                        self.err(format!("field `{name}` appears twice in `{}`", self.ctx.path.join(".")));
                    }
                    tpl.push(Tpl::Field(name.clone(), v.fmt));
                    fields.push((name, v.build, v.kind));
                    idx += 1;
                }
            }
        }
        (Shape::Record(fields), tpl)
    }

    fn block(&mut self, e: &ParseExpr, hint: &str) -> (Vec<Slot>, Vec<Piece>) {
        let mut slots = Vec::new();
        let mut pieces = Vec::new();
        self.lower_elem(e, &mut slots, &mut pieces, hint, false);
        (slots, pieces)
    }

    /// Element value of a list or optional body.
    fn element(&mut self, slots: &[Slot], pieces: Vec<Piece>, hint: &str) -> (Build, Kind, Vec<Tpl>) {
        let n = slots.len() as u32;
        let (shape, tpl) = self.assemble(pieces, false);
        match shape {
            Shape::Unit => {
                self.register_type(UNIT_TYPE, TypeDef::Product(vec![]));
                self.register_template(UNIT_TYPE.to_string(), vec![]);
                (Build::Node { ty: vec![UNIT_TYPE.into()], span: (0, n), fields: vec![] }, Kind::Type(UNIT_TYPE.into()), tpl)
            }
            Shape::Single(b, k) => (b, k, tpl),
            Shape::Record(fields) => {
                let (b, k, f) = self.record(hint, vec![hint.to_string()], (0, n), fields, tpl);
                (b, k, vec![Tpl::Value(f)])
            }
        }
    }

    fn lower_sugar(&mut self, e: &ParseExpr, hint: &str) -> (NtId, Kind, Fmt) {
        let nt = self.new_synth(Some(display_of(e)));
        match e {
            ParseExpr::Optional(x) => {
                let (slots, pieces) = self.block(x, hint);
                if pieces.iter().all(|p| matches!(p, Piece::Tpl(_))) {
                    let tpl = pieces.into_iter().filter_map(|p| if let Piece::Tpl(t) = p { Some(t) } else { None }).collect();
                    self.add_prod(nt, vec![], Build::Bool(false));
                    self.add_prod(nt, slots, Build::Bool(true));
                    return (nt, Kind::Bool, Fmt::Bool(tpl));
                }
                let (b, k, tpl) = self.element(&slots, pieces, hint);
                self.add_prod(nt, vec![], Build::OptNone);
                self.add_prod(nt, slots, Build::OptSome(Box::new(b)));
                (nt, Kind::Opt(Box::new(k)), Fmt::Opt(tpl))
            }
            ParseExpr::Star(x) => self.lower_list(nt, ListFlavor::L, x, 0, &ParseExpr::Eps, Trailing::None, hint),
            ParseExpr::Plus(x) => self.lower_list(nt, ListFlavor::L, x, 1, &ParseExpr::Eps, Trailing::None, hint),
            ParseExpr::ListExpr { flavor, elem, min, delim, trailing } => {
                self.lower_list(nt, *flavor, elem, *min, delim, *trailing, hint)
            }
            ParseExpr::AltBranches(bs) => self.lower_alt(nt, bs.iter().map(|(l, x)| (l.clone(), x)).collect(), hint),
            ParseExpr::SingletonAlt(l, x) => self.lower_alt(nt, vec![(l.clone(), x.as_ref())], hint),
            _ => unreachable!("not sugar"),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn lower_list(
        &mut self,
        nt: NtId,
        flavor: ListFlavor,
        elem: &ParseExpr,
        min: u8,
        delim: &ParseExpr,
        trailing: Trailing,
        hint: &str,
    ) -> (NtId, Kind, Fmt) {
        let (eslots, epieces) = self.block(elem, hint);
        let (eb, ek, etpl) = self.element(&eslots, epieces, hint);
        let (dslots, dpieces) = self.block(delim, hint);
        let mut dtpl = Vec::new();
        for p in dpieces {
            match p {
                Piece::Tpl(t) => dtpl.push(t),
                Piece::Val(v) => self.err(format!("list delimiter carries content `{}`", v.src)),
            }
        }
        let ne = eslots.len() as u32;
        let nd = dslots.len() as u32;
        let cat = |parts: &[&[Slot]]| -> Vec<Slot> { parts.iter().flat_map(|p| p.iter().cloned()).collect() };
        let self_slot = Slot::new(Sym::N(nt));
        let push = |list_off: u32, elem_off: u32| Build::SeqPush { list: list_off, elem: Box::new(shift(&eb, elem_off)) };
        let fmt = Fmt::List { flavor, elem: etpl, delim: dtpl, trailing };
        let kind = Kind::Seq(Box::new(ek));

        // Base list (no trailing delimiter) of at least max(min, 1) elements.
        let base = |lw: &mut Self, target: NtId, min: u8| {
            let tslot = Slot::new(Sym::N(target));
            match min {
                0 | 1 => lw.add_prod(target, eslots.clone(), Build::SeqNew(vec![eb.clone()])),
                _ => lw.add_prod(
                    target,
                    cat(&[&eslots, &dslots, &eslots]),
                    Build::SeqNew(vec![eb.clone(), shift(&eb, ne + nd)]),
                ),
            }
            lw.add_prod(target, cat(&[&[tslot], &dslots, &eslots]), push(0, 1 + nd));
        };

        match trailing {
            Trailing::Required => {
                match min {
                    0 => self.add_prod(nt, vec![], Build::SeqNew(vec![])),
                    1 => self.add_prod(nt, cat(&[&eslots, &dslots]), Build::SeqNew(vec![eb.clone()])),
                    _ => self.add_prod(
                        nt,
                        cat(&[&eslots, &dslots, &eslots, &dslots]),
                        Build::SeqNew(vec![eb.clone(), shift(&eb, ne + nd)]),
                    ),
                }
                self.add_prod(nt, cat(&[&[self_slot], &eslots, &dslots]), push(0, 1));
            }
            Trailing::None if min == 0 && nd == 0 => {
                self.add_prod(nt, vec![], Build::SeqNew(vec![]));
                self.add_prod(nt, cat(&[&[self_slot], &eslots]), push(0, 1));
            }
            Trailing::None if min == 0 => {
                let inner = self.helper_nt(nt);
                base(self, inner, 1);
                self.add_prod(nt, vec![], Build::SeqNew(vec![]));
                self.add_prod(nt, vec![Slot::new(Sym::N(inner))], Build::Slot(0));
            }
            Trailing::None => base(self, nt, min),
            Trailing::Optional => {
                let inner = self.helper_nt(nt);
                base(self, inner, min.max(1));
                let islot = Slot::new(Sym::N(inner));
                if min == 0 {
                    self.add_prod(nt, vec![], Build::SeqNew(vec![]));
                }
                self.add_prod(nt, vec![islot.clone()], Build::Slot(0));
                self.add_prod(nt, cat(&[&[islot], &dslots]), Build::SeqTrailing { list: 0 });
            }
        }
        (nt, kind, fmt)
    }

    fn lower_alt(&mut self, nt: NtId, branches: Vec<(Option<String>, &ParseExpr)>, hint: &str) -> (NtId, Kind, Fmt) {
        let mut cases = Vec::new();
        let mut labels = BTreeSet::new();
        for (i, (label, x)) in branches.into_iter().enumerate() {
            let label = match label {
                Some(l) => l,
                None => {
                    if self.name_strict {
                        self.err(format!(
                            "name_strict violation in `{}`: unlabeled alternative `{}`",
                            self.ctx.path.join("."),
                            render_parse_expr(x)
                        ));
                    }
                    format!("_b{i}")
                }
            };
            if !labels.insert(label.clone()) {
                self.err(format!("duplicate alternative label `{label}`"));
            }
            let (slots, pieces) = self.block(x, &format!("{hint}_{label}"));
            let n = slots.len() as u32;
            let (shape, tpl) = self.assemble(pieces, true);
            let ty = vec![hint.to_string(), label.clone()];
            self.register_template(ty.join("."), tpl);
            let (build, def) = match shape {
                Shape::Record(fields) => {
                    let def = TypeDef::Product(
                        fields.iter().map(|(n, _, k)| Field { name: n.clone(), ty: k.type_expr() }).collect(),
                    );
                    (Build::Node { ty, span: (0, n), fields: fields.into_iter().map(|(n, b, _)| (n, b)).collect() }, def)
                }
                _ => (Build::Label { ty: vec![hint.to_string()], label: label.clone(), span: (0, n) }, TypeDef::Product(vec![])),
            };
            self.add_prod(nt, slots, build);
            cases.push(Case { name: label, def });
        }
        self.register_type(hint, TypeDef::Sum(cases).normalize());
        (nt, Kind::Type(hint.to_string()), Fmt::Node)
    }
}

fn build_sum(entries: &[(Vec<String>, Vec<Field>)]) -> TypeDef {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<(Vec<String>, Vec<Field>)>> = BTreeMap::new();
    for (path, fields) in entries {
        let Some((head, rest)) = path.split_first() else { continue };
        if !groups.contains_key(head) {
            order.push(head.clone());
        }
        groups.entry(head.clone()).or_default().push((rest.to_vec(), fields.clone()));
    }
    TypeDef::Sum(
        order
            .into_iter()
            .map(|name| {
                let g = &groups[&name];
                let def = if g.len() == 1 && g[0].0.is_empty() { TypeDef::Product(g[0].1.clone()) } else { build_sum(g) };
                Case { name, def }
            })
            .collect(),
    )
}
