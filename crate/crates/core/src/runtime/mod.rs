//! Parsing with compiled tables: generic trees with source bounds, and
//! user-facing error blocks.

mod engine;
mod error;
mod value;

pub use engine::parse_tokens;
pub use error::{location_fmt_str, ParseError, ParseErrorKind};
pub use value::{Bounds, Node, Seq, Token, Value};
