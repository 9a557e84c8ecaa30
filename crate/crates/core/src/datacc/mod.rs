//! Algebraic datatype schemas (`.data`) and their runtime values.

mod parse;
mod schema;
mod value;

pub use parse::parse_data_spec;
pub use schema::*;
pub use value::*;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DataError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("unknown type path `{0}`")]
    UnknownPath(String),
    #[error("value is not a record")]
    NotARecord,
    #[error("no field `{0}`")]
    NoSuchField(String),
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },
}
