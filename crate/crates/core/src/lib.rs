//! Parser-generator toolchain: `.lang` frontend, lexer and LR(k) compilers,
//! conflict tracing, parse runtime and pretty printing.

pub mod compiled;
pub mod datacc;
pub mod driver;
pub mod grammar;
pub mod lexer;
pub mod lr;
pub mod meta;
pub mod printer;
pub mod runtime;
pub mod trace;

pub use compiled::{compile_source, compile_spec, CompileError, CompileOptions, Compilation, CompiledLang, ParseResult};
pub use datacc::{DataValue, DatatypeSchema};
pub use meta::{parse_lang_spec, LangSpec};
pub use printer::pretty_print;
pub use runtime::{location_fmt_str, Bounds, Node, ParseError, Value};
