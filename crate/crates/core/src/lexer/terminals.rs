use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Terminal {
    /// End-of-input marker used in lookaheads.
    End,
    Opaque(String),
    Literal(String),
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Terminal::End => f.write_str("$"),
            Terminal::Opaque(n) => f.write_str(n),
            Terminal::Literal(s) => write!(f, "`{}`", crate::meta::lex::escape(s)),
        }
    }
}

/// Terminal numbering shared by the lexer and the parser. Id 0 is always
/// [`Terminal::End`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminals {
    list: Vec<Terminal>,
    #[serde(skip)]
    index: BTreeMap<Terminal, u32>,
}

impl Default for Terminals {
    fn default() -> Self {
        let mut t = Terminals { list: vec![], index: BTreeMap::new() };
        t.intern(Terminal::End);
        t
    }
}

impl Terminals {
    pub const END: u32 = 0;

    pub fn intern(&mut self, t: Terminal) -> u32 {
        if let Some(&id) = self.index.get(&t) {
            return id;
        }
        let id = self.list.len() as u32;
        self.index.insert(t.clone(), id);
        self.list.push(t);
        id
    }

    pub fn id(&self, t: &Terminal) -> Option<u32> {
        if self.index.len() == self.list.len() {
            return self.index.get(t).copied();
        }
        self.list.iter().position(|x| x == t).map(|i| i as u32)
    }

    pub fn get(&self, id: u32) -> &Terminal {
        &self.list[id as usize]
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Terminal)> {
        self.list.iter().enumerate().map(|(i, t)| (i as u32, t))
    }

    /// Rebuilds the lookup index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.list.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
    }

    pub fn name(&self, id: u32) -> String {
        self.get(id).to_string()
    }
}
