//! Pretty-print templates, one per node-producing variant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::meta::{ListFlavor, Trailing};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tpl {
    /// A literal terminal.
    Text(String),
    /// Printed but never parsed: `@(...)` and `_`.
    Verbatim(String),
    /// A field of the current node.
    Field(String, Fmt),
    /// The current value itself (single-content blocks).
    Value(Fmt),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fmt {
    Token,
    /// A single-content block printed in place, with its surrounding text.
    Inline(Vec<Tpl>),
    /// Node or label; printed through the template registered for its type path.
    Node,
    Opt(Vec<Tpl>),
    Bool(Vec<Tpl>),
    List { flavor: ListFlavor, elem: Vec<Tpl>, delim: Vec<Tpl>, trailing: Trailing },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrintTemplates {
    /// Keyed by the dotted type path of the node or label.
    pub by_type: BTreeMap<String, Vec<Tpl>>,
    pub indent_unit: usize,
}
