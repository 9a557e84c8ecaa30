//! Generic parse trees.

use std::fmt::Write;
use std::sync::Arc;


/// Half-open byte range in the parsed input. Bounds are metadata: they never
/// take part in equality, so trees from differently formatted inputs compare
/// structurally.
#[derive(Clone, Copy, Debug, Default)]
pub struct Bounds {
    pub start: usize,
    pub end: usize,
}

impl Bounds {
    pub fn new(start: usize, end: usize) -> Bounds {
        Bounds { start, end }
    }

    pub fn contains(&self, other: &Bounds) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl PartialEq for Bounds {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Bounds {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub term: u32,
    pub text: String,
    pub bounds: Bounds,
}

/// A rule variant, an alternative branch, or an enum label (no fields).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub ty: Vec<String>,
    pub fields: Vec<(String, Value)>,
    pub bounds: Bounds,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seq {
    pub items: Vec<Value>,
    /// The source had a delimiter after the last element.
    pub trailing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Token(Token),
    Node(Arc<Node>),
    Bool(bool),
    Opt(Option<Box<Value>>),
    Seq(Seq),
}

impl Node {
    pub fn field(&self, name: &str) -> Option<&Value> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Dotted variant path, e.g. `Expr.BinOp1`.
    pub fn variant(&self) -> String {
        self.ty.join(".")
    }

    /// Whether the variant path starts with `path`.
    pub fn is(&self, path: &[&str]) -> bool {
        path.len() <= self.ty.len() && self.ty.iter().zip(path).all(|(a, b)| a == b)
    }
}

impl Value {
    pub fn as_node(&self) -> Option<&Arc<Node>> {
        match self {
            Value::Node(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_token(&self) -> Option<&Token> {
        match self {
            Value::Token(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&Seq> {
        match self {
            Value::Seq(s) => Some(s),
            _ => None,
        }
    }

    /// Source extent, when the value has one of its own.
    pub fn bounds(&self) -> Option<Bounds> {
        match self {
            Value::Token(t) => Some(t.bounds),
            Value::Node(n) => Some(n.bounds),
            _ => None,
        }
    }

    /// `Stmt::Expr{x: Expr::Lit::Int_{val: "1"}}`
    pub fn debug_string(&self) -> String {
        let mut s = String::new();
        self.write_debug(&mut s);
        s
    }

    fn write_debug(&self, out: &mut String) {
        match self {
            Value::Token(t) => {
                let _ = write!(out, "{:?}", t.text);
            }
            Value::Node(n) => {
                out.push_str(&n.ty.join("::"));
                if !n.fields.is_empty() {
                    out.push('{');
                    for (i, (name, v)) in n.fields.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        let _ = write!(out, "{name}: ");
                        v.write_debug(out);
                    }
                    out.push('}');
                }
            }
            Value::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            Value::Opt(None) => out.push_str("None"),
            Value::Opt(Some(v)) => {
                out.push_str("Some(");
                v.write_debug(out);
                out.push(')');
            }
            Value::Seq(s) => {
                out.push('[');
                for (i, v) in s.items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    v.write_debug(out);
                }
                out.push(']');
            }
        }
    }
}
