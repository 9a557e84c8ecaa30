//! LR(k) automaton construction and parse tables.

mod build;
mod first;
mod tables;

pub use build::{
    build_lr, Aug, ConflictSite, GProd, GSym, Item, LrAction, LrAutomaton, LrBuildError, LrOptions, LrState,
    StateId,
};
pub use first::{concat_k, FirstK, FirstSet, TermString};
pub use tables::{LrTables, Row};

#[cfg(test)]
pub(crate) mod tests;
