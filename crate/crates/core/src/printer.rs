//! Pretty printing from per-variant templates, and the round-trip check.

use crate::grammar::{Fmt, PrintTemplates, Tpl};
use crate::meta::{ListFlavor, Trailing};
use crate::runtime::{Node, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrintError {
    #[error("no print template for `{0}`")]
    NoTemplate(String),
    #[error("value does not match its template: expected {expected}, found {found}")]
    Mismatch { expected: &'static str, found: String },
    #[error("node `{node}` has no field `{field}`")]
    MissingField { node: String, field: String },
}

struct Printer<'a> {
    tpls: &'a PrintTemplates,
    out: String,
    level: usize,
}

fn kind_of(v: &Value) -> String {
    match v {
        Value::Token(_) => "token".into(),
        Value::Node(n) => format!("node `{}`", n.variant()),
        Value::Bool(_) => "bool".into(),
        Value::Opt(_) => "option".into(),
        Value::Seq(_) => "sequence".into(),
    }
}

impl Printer<'_> {
    fn newline(&mut self, blank: bool, level: usize) {
        if blank {
            self.out.push('\n');
        }
        self.out.push('\n');
        self.out.push_str(&" ".repeat(level * self.tpls.indent_unit));
    }

    /// `v` must hold a node; its template prints it.
    fn node(&mut self, v: &Value, n: &Node) -> Result<(), PrintError> {
        let key = n.variant();
        let tpl = self.tpls.by_type.get(&key).ok_or(PrintError::NoTemplate(key))?;
        self.tpl(tpl, v)
    }

    fn tpl(&mut self, tpl: &[Tpl], cur: &Value) -> Result<(), PrintError> {
        for t in tpl {
            match t {
                Tpl::Text(s) | Tpl::Verbatim(s) => self.out.push_str(s),
                Tpl::Field(name, fmt) => {
                    let Value::Node(n) = cur else {
                        return Err(PrintError::Mismatch { expected: "node", found: kind_of(cur) });
                    };
                    let v = n
                        .field(name)
                        .ok_or_else(|| PrintError::MissingField { node: n.variant(), field: name.clone() })?;
                    self.fmt(fmt, v)?;
                }
                Tpl::Value(fmt) => self.fmt(fmt, cur)?,
            }
        }
        Ok(())
    }

    fn fmt(&mut self, fmt: &Fmt, v: &Value) -> Result<(), PrintError> {
        let mismatch = |expected| PrintError::Mismatch { expected, found: kind_of(v) };
        match fmt {
            Fmt::Token => {
                let t = v.as_token().ok_or_else(|| mismatch("token"))?;
                self.out.push_str(&t.text);
            }
            Fmt::Inline(tpl) => self.tpl(tpl, v)?,
            Fmt::Node => {
                let n = v.as_node().ok_or_else(|| mismatch("node"))?;
                self.node(v, n)?;
            }
            Fmt::Opt(tpl) => match v {
                Value::Opt(Some(x)) => self.tpl(tpl, x)?,
                Value::Opt(None) => {}
                _ => return Err(mismatch("option")),
            },
            Fmt::Bool(tpl) => match v {
                Value::Bool(true) => self.tpl(tpl, v)?,
                Value::Bool(false) => {}
                _ => return Err(mismatch("bool")),
            },
            Fmt::List { flavor, elem, delim, trailing } => {
                let s = v.as_seq().ok_or_else(|| mismatch("sequence"))?;
                let n = s.items.len();
                let level = self.level;
                for (i, x) in s.items.iter().enumerate() {
                    match flavor {
                        ListFlavor::L => {}
                        ListFlavor::B | ListFlavor::B2 => self.newline(*flavor == ListFlavor::B2 && i > 0, level + 1),
                        ListFlavor::T | ListFlavor::T2 => {
                            if i > 0 {
                                self.newline(*flavor == ListFlavor::T2, level);
                            }
                        }
                    }
                    if matches!(flavor, ListFlavor::B | ListFlavor::B2) {
                        self.level = level + 1;
                    }
                    self.tpl(elem, x)?;
                    self.level = level;
                    let last = i + 1 == n;
                    let delim_here = match trailing {
                        Trailing::Required => true,
                        Trailing::Optional => !last || s.trailing,
                        Trailing::None => !last,
                    };
                    if delim_here {
                        self.tpl(delim, x)?;
                    }
                }
                if n > 0 && matches!(flavor, ListFlavor::B | ListFlavor::B2) {
                    self.newline(false, level);
                }
            }
        }
        Ok(())
    }
}

pub fn pretty_print(tpls: &PrintTemplates, v: &Value) -> Result<String, PrintError> {
    let mut p = Printer { tpls, out: String::new(), level: 0 };
    match v {
        Value::Node(n) => p.node(v, n)?,
        other => return Err(PrintError::Mismatch { expected: "node", found: kind_of(other) }),
    }
    Ok(p.out)
}

/// Offset of the first differing byte, if the strings differ.
pub fn first_divergence(a: &str, b: &str) -> Option<usize> {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(i) => Some(i),
        None if a.len() != b.len() => Some(a.len().min(b.len())),
        None => None,
    }
}
