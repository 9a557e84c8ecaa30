//! Lowering of parser rules to an attribute-constrained context-free grammar.

mod cfg;
mod lower;
mod template;

pub use cfg::*;
pub use lower::{lower_grammar, Lowered, DEFAULT_INDENT, UNIT_TYPE};
pub use template::{Fmt, PrintTemplates, Tpl};
