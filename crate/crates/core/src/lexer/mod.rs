//! Lexer compilation (Thompson NFA, subset construction, static ambiguity
//! rejection) and the mode-stack runtime.

mod compile;
pub mod dfa;
pub mod nfa;
mod runtime;
mod terminals;

pub use compile::{compile_lexer, Action, CompiledMode, LexCompileError, LexerProgram};
pub use dfa::{AcceptTag, Dfa, DfaState};
pub use runtime::{lex, token_bounds_to_linecol, Extract, LexError, LexOutput, LexToken, LineCol, LineIndex};
pub use terminals::{Terminal, Terminals};

#[cfg(test)]
mod tests;
