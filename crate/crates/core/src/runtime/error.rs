use std::fmt;

use super::value::Bounds;
use crate::lexer::{LexError, LineIndex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lex(LexError),
    UnexpectedToken { state: u32 },
    UnexpectedEof { state: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// e.g. "Unexpected token: `/`"
    pub message: String,
    /// The offending token, or an empty range at the failure offset.
    pub bounds: Bounds,
}

impl ParseError {
    pub fn offset(&self) -> usize {
        self.bounds.start
    }

    /// The message followed by the location block.
    pub fn render(&self, input: &str) -> String {
        format!("{}\n{}", self.message, location_fmt_str(input, self.bounds))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ParseError {}

/// ```text
/// Line 1, column 10:
///
///   7 + (5 + / 3)
///            ^
/// ```
/// The caret line is padded to the length of the source line.
pub fn location_fmt_str(input: &str, bounds: Bounds) -> String {
    let ix = LineIndex::new(input);
    let lc = ix.line_col(bounds.start.min(input.len()));
    let line = ix.line_text(lc.line);
    let width = line.chars().count();
    let before = lc.col as usize - 1;
    let after = (width + 1).saturating_sub(lc.col as usize);
    format!(
        "Line {}, column {}:\n\n  {}\n  {}^{}\n",
        lc.line,
        lc.col,
        line,
        " ".repeat(before),
        " ".repeat(after)
    )
}
