use alloc::string::String;
use core::fmt;

/// Whether a symbol may be rewritten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Nonterminal,
    Terminal,
}

/// A named grammar symbol. Names are multi-character tokens such as `S'`, `A''` or `X2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: String,
    kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: impl Into<String>, kind: SymbolKind) -> Result<Self, InvalidToken> {
        let name = name.into();
        if !is_valid_token(&name) {
            return Err(InvalidToken(name));
        }
        Ok(Symbol { name, kind })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_terminal(&self) -> bool {
        self.kind == SymbolKind::Terminal
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid symbol token `{0}`")]
pub struct InvalidToken(pub String);

/// First character alphabetic, the rest alphanumeric, `_` or `'`.
pub fn is_valid_token(token: &str) -> bool {
    let mut chars = token.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Index of a symbol inside one grammar's symbol table.
///
/// Ids are only meaningful relative to the grammar that issued them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub(crate) u16);

impl Sym {
    pub const MAX_SYMBOLS: usize = u16::MAX as usize;

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(i: usize) -> Sym {
        debug_assert!(i < Self::MAX_SYMBOLS);
        Sym(i as u16)
    }
}
