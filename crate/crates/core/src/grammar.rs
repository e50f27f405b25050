//! Scattered context grammars `(N, T, P, S)` and their descriptional metrics.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::symbol::{InvalidToken, Sym, Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error(transparent)]
    InvalidToken(#[from] InvalidToken),
    #[error("symbol `{0}` declared more than once")]
    DuplicateSymbol(String),
    #[error("start symbol `{0}` is not a declared nonterminal")]
    StartNotNonterminal(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("production has an empty left-hand side")]
    EmptyLhs,
    #[error("empty left-hand component")]
    EmptyLhsComponent,
    #[error("left-hand symbol `{0}` is not a nonterminal")]
    LhsNotNonterminal(String),
    #[error("left-hand side has {lhs} components but right-hand side has {rhs}")]
    ArityMismatch { lhs: usize, rhs: usize },
    #[error("grammar declares more than {} symbols", Sym::MAX_SYMBOLS)]
    TooManySymbols,
}

/// `(A1, ..., An) -> (x1, ..., xn)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScatteredProduction {
    lhs: Vec<Sym>,
    rhs: Vec<Vec<Sym>>,
}

impl ScatteredProduction {
    pub fn lhs(&self) -> &[Sym] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[Vec<Sym>] {
        &self.rhs
    }

    /// Number of nonterminals rewritten simultaneously.
    pub fn width(&self) -> usize {
        self.lhs.len()
    }

    pub fn is_context_free(&self) -> bool {
        self.width() == 1
    }

    pub fn is_erasing(&self) -> bool {
        self.rhs.iter().any(Vec::is_empty)
    }

    /// Total length of the right-hand components.
    pub fn rhs_len(&self) -> usize {
        self.rhs.iter().map(Vec::len).sum()
    }

    /// Length of a form after one application, given its length before.
    pub fn result_len(&self, form_len: usize) -> usize {
        form_len - self.width() + self.rhs_len()
    }
}

/// A validated scattered context grammar.
///
/// The symbol table lists nonterminals first, then terminals, both in declaration order.
/// Production order is significant: a production is identified by its index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatteredContextGrammar {
    symbols: Vec<Symbol>,
    nonterminal_count: usize,
    start: Sym,
    productions: Vec<ScatteredProduction>,
}

impl ScatteredContextGrammar {
    pub fn builder<I, J, N, T>(
        nonterminals: I,
        terminals: J,
        start: &str,
    ) -> Result<GrammarBuilder, GrammarError>
    where
        I: IntoIterator<Item = N>,
        J: IntoIterator<Item = T>,
        N: AsRef<str>,
        T: AsRef<str>,
    {
        GrammarBuilder::new(nonterminals, terminals, start)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, sym: Sym) -> &Symbol {
        &self.symbols[sym.index()]
    }

    pub fn name(&self, sym: Sym) -> &str {
        self.symbols[sym.index()].name()
    }

    pub fn nonterminals(&self) -> &[Symbol] {
        &self.symbols[..self.nonterminal_count]
    }

    pub fn terminals(&self) -> &[Symbol] {
        &self.symbols[self.nonterminal_count..]
    }

    pub fn is_terminal(&self, sym: Sym) -> bool {
        sym.index() >= self.nonterminal_count
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.symbols
            .iter()
            .position(|s| s.name() == name)
            .map(Sym::from_index)
    }

    pub fn start(&self) -> Sym {
        self.start
    }

    pub fn productions(&self) -> &[ScatteredProduction] {
        &self.productions
    }

    pub fn production(&self, index: usize) -> Option<&ScatteredProduction> {
        self.productions.get(index)
    }

    pub fn is_erasing(&self) -> bool {
        self.productions.iter().any(ScatteredProduction::is_erasing)
    }

    /// Pairs `(i, j)`, `i < j`, of identical productions. Permitted, but worth a warning.
    pub fn duplicate_productions(&self) -> Vec<(usize, usize)> {
        let mut dups = Vec::new();
        for (i, p) in self.productions.iter().enumerate() {
            for (j, q) in self.productions.iter().enumerate().skip(i + 1) {
                if p == q {
                    dups.push((i, j));
                }
            }
        }
        dups
    }

    pub fn metrics(&self) -> GrammarMetrics {
        compute_metrics(self)
    }

    /// Renders a symbol string as whitespace-separated tokens, `@` when empty.
    pub fn render_symbols(&self, syms: &[Sym]) -> String {
        if syms.is_empty() {
            return "@".to_string();
        }
        let mut out = String::new();
        for (i, &s) in syms.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.name(s));
        }
        out
    }

    pub fn display_production(&self, index: usize) -> DisplayProduction<'_> {
        DisplayProduction {
            grammar: self,
            production: &self.productions[index],
        }
    }
}

/// Formats a production as `(A, B) -> (a A, @)`.
pub struct DisplayProduction<'a> {
    grammar: &'a ScatteredContextGrammar,
    production: &'a ScatteredProduction,
}

impl fmt::Display for DisplayProduction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, &a) in self.production.lhs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(self.grammar.name(a))?;
        }
        f.write_str(") -> (")?;
        for (i, x) in self.production.rhs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&self.grammar.render_symbols(x))?;
        }
        f.write_str(")")
    }
}

/// Incremental construction, so callers can attribute errors to individual productions.
#[derive(Debug, Clone)]
pub struct GrammarBuilder {
    grammar: ScatteredContextGrammar,
}

impl GrammarBuilder {
    pub fn new<I, J, N, T>(nonterminals: I, terminals: J, start: &str) -> Result<Self, GrammarError>
    where
        I: IntoIterator<Item = N>,
        J: IntoIterator<Item = T>,
        N: AsRef<str>,
        T: AsRef<str>,
    {
        let mut symbols: Vec<Symbol> = Vec::new();
        let mut declare = |name: &str, kind| -> Result<(), GrammarError> {
            let symbol = Symbol::new(name, kind)?;
            if symbols.iter().any(|s| s.name() == name) {
                return Err(GrammarError::DuplicateSymbol(name.to_string()));
            }
            symbols.push(symbol);
            Ok(())
        };
        for n in nonterminals {
            declare(n.as_ref(), SymbolKind::Nonterminal)?;
        }
        for t in terminals {
            declare(t.as_ref(), SymbolKind::Terminal)?;
        }
        if symbols.len() > Sym::MAX_SYMBOLS {
            return Err(GrammarError::TooManySymbols);
        }
        let nonterminal_count = symbols
            .iter()
            .take_while(|s| s.kind() == SymbolKind::Nonterminal)
            .count();
        let start_index = symbols[..nonterminal_count]
            .iter()
            .position(|s| s.name() == start)
            .ok_or_else(|| GrammarError::StartNotNonterminal(start.to_string()))?;
        Ok(GrammarBuilder {
            grammar: ScatteredContextGrammar {
                symbols,
                nonterminal_count,
                start: Sym::from_index(start_index),
                productions: Vec::new(),
            },
        })
    }

    fn resolve(&self, name: &str) -> Result<Sym, GrammarError> {
        self.grammar
            .lookup(name)
            .ok_or_else(|| GrammarError::UndeclaredSymbol(name.to_string()))
    }

    /// Appends `(lhs[0], ...) -> (rhs[0], ...)`; each rhs component is a token sequence.
    pub fn add_production<L, R, C, S>(&mut self, lhs: L, rhs: R) -> Result<usize, GrammarError>
    where
        L: IntoIterator<Item = S>,
        R: IntoIterator<Item = C>,
        C: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lhs_syms = Vec::new();
        for name in lhs {
            let name = name.as_ref();
            if name.is_empty() {
                return Err(GrammarError::EmptyLhsComponent);
            }
            let sym = self.resolve(name)?;
            if self.grammar.is_terminal(sym) {
                return Err(GrammarError::LhsNotNonterminal(name.to_string()));
            }
            lhs_syms.push(sym);
        }
        if lhs_syms.is_empty() {
            return Err(GrammarError::EmptyLhs);
        }
        let mut rhs_syms = Vec::new();
        for component in rhs {
            let mut syms = Vec::new();
            for name in component {
                syms.push(self.resolve(name.as_ref())?);
            }
            rhs_syms.push(syms);
        }
        if lhs_syms.len() != rhs_syms.len() {
            return Err(GrammarError::ArityMismatch {
                lhs: lhs_syms.len(),
                rhs: rhs_syms.len(),
            });
        }
        self.grammar.productions.push(ScatteredProduction {
            lhs: lhs_syms,
            rhs: rhs_syms,
        });
        Ok(self.grammar.productions.len() - 1)
    }

    /// Same as [`GrammarBuilder::add_production`] with `@`-free, space-separated components,
    /// e.g. `add("A B C", &["a A", "b B", "c C"])`. Empty component strings are erasing.
    pub fn add(&mut self, lhs: &str, rhs: &[&str]) -> Result<usize, GrammarError> {
        self.add_production(
            lhs.split_whitespace(),
            rhs.iter().map(|c| c.split_whitespace()),
        )
    }

    pub fn build(self) -> ScatteredContextGrammar {
        self.grammar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GrammarMetrics {
    pub nonterminal_count: usize,
    pub terminal_count: usize,
    pub production_count: usize,
    pub non_cf_production_count: usize,
    /// Maximal number of nonterminals rewritten in one step; 0 only for a grammar without productions.
    pub width: usize,
    pub is_erasing: bool,
}

pub fn compute_metrics(g: &ScatteredContextGrammar) -> GrammarMetrics {
    let productions = g.productions();
    GrammarMetrics {
        nonterminal_count: g.nonterminals().len(),
        terminal_count: g.terminals().len(),
        production_count: productions.len(),
        non_cf_production_count: productions.iter().filter(|p| !p.is_context_free()).count(),
        width: productions.iter().map(|p| p.width()).max().unwrap_or(0),
        is_erasing: g.is_erasing(),
    }
}

impl fmt::Display for GrammarMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nonterminals: {}", self.nonterminal_count)?;
        writeln!(f, "terminals: {}", self.terminal_count)?;
        writeln!(f, "productions: {}", self.production_count)?;
        writeln!(f, "non-context-free productions: {}", self.non_cf_production_count)?;
        writeln!(f, "width: {}", self.width)?;
        write!(f, "erasing: {}", self.is_erasing)
    }
}
