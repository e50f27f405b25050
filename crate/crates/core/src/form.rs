use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::Deref;

use crate::symbol::Sym;

/// A finite symbol sequence, possibly empty. Symbols are relative to one grammar.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SententialForm(Vec<Sym>);

impl SententialForm {
    pub fn new(symbols: Vec<Sym>) -> Self {
        SententialForm(symbols)
    }

    pub fn as_slice(&self) -> &[Sym] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Sym> {
        self.0
    }

    /// Number of occurrences of `sym`.
    pub fn count(&self, sym: Sym) -> usize {
        self.0.iter().filter(|&&s| s == sym).count()
    }
}

impl Deref for SententialForm {
    type Target = [Sym];

    fn deref(&self) -> &[Sym] {
        &self.0
    }
}

impl From<Vec<Sym>> for SententialForm {
    fn from(v: Vec<Sym>) -> Self {
        SententialForm(v)
    }
}

impl From<&[Sym]> for SententialForm {
    fn from(v: &[Sym]) -> Self {
        SententialForm(v.to_vec())
    }
}

/// A terminal word as a token sequence, independent of any grammar's symbol ids.
///
/// Ordered by length first, then lexicographically by token.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<String>);

impl Word {
    pub fn new(tokens: Vec<String>) -> Self {
        Word(tokens)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Splits on whitespace; `@` alone is the empty word.
    pub fn parse(text: &str) -> Self {
        let tokens: Vec<String> = text
            .split_whitespace()
            .filter(|t| *t != "@")
            .map(String::from)
            .collect();
        Word(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }
}

impl Deref for Word {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("@");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t)?;
        }
        Ok(())
    }
}

/// A start form plus the steps applied to it, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace<S> {
    pub start: SententialForm,
    pub steps: Vec<S>,
}

impl<S> Trace<S> {
    pub fn new(start: SententialForm) -> Self {
        Trace {
            start,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}
