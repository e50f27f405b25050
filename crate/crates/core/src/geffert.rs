//! Geffert normal form: context-free rules `S' -> u S' a`, `S' -> u S' v`, `S' -> λ` over the
//! fixed nonterminals `{S', A, B, C, D}`, plus the erasures `AB -> λ` and `CD -> λ`.
//!
//! The erasures need adjacency, which scattered productions cannot express, so this module
//! has its own stepper.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

use crate::derive::WordError;
use crate::form::{SententialForm, Trace};
use crate::grammar::GrammarError;
use crate::search::{self, BoundedLanguage, EnumerationBounds, Expand, SearchTree};
use crate::symbol::{Sym, Symbol, SymbolKind};

pub const S_PRIME: &str = "S'";
pub const NONTERMINALS: [&str; 5] = [S_PRIME, "A", "B", "C", "D"];

const SP: Sym = Sym(0);
const A: Sym = Sym(1);
const B: Sym = Sym(2);
const C: Sym = Sym(3);
const D: Sym = Sym(4);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GeffertRule {
    /// `S' -> u S' a`
    AppendTerminal { u: Vec<Sym>, a: Sym },
    /// `S' -> u S' v`
    Bilateral { u: Vec<Sym>, v: Vec<Sym> },
    /// `S' -> λ`
    Erase,
}

impl GeffertRule {
    /// The right-hand side as a symbol string.
    pub fn rhs(&self) -> Vec<Sym> {
        match self {
            GeffertRule::AppendTerminal { u, a } => {
                let mut out = u.clone();
                out.push(SP);
                out.push(*a);
                out
            }
            GeffertRule::Bilateral { u, v } => {
                let mut out = u.clone();
                out.push(SP);
                out.extend_from_slice(v);
                out
            }
            GeffertRule::Erase => Vec::new(),
        }
    }

    pub fn shape(&self) -> &'static str {
        match self {
            GeffertRule::AppendTerminal { .. } => "append-terminal",
            GeffertRule::Bilateral { .. } => "bilateral",
            GeffertRule::Erase => "erase",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeffertError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("terminal `{0}` clashes with a reserved nonterminal")]
    ReservedName(String),
    #[error("right-hand side must contain `S'` exactly once, or be `@`")]
    MissingSPrime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeffertGrammar {
    symbols: Vec<Symbol>,
    rules: Vec<GeffertRule>,
}

impl GeffertGrammar {
    pub fn new<I, T>(terminals: I) -> Result<Self, GeffertError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut symbols: Vec<Symbol> = NONTERMINALS
            .iter()
            .map(|n| Symbol::new(*n, SymbolKind::Nonterminal).expect("reserved names are tokens"))
            .collect();
        for t in terminals {
            let t = t.as_ref();
            if NONTERMINALS.contains(&t) {
                return Err(GeffertError::ReservedName(t.to_string()));
            }
            let sym = Symbol::new(t, SymbolKind::Terminal).map_err(GrammarError::from)?;
            if symbols.contains(&sym) {
                return Err(GrammarError::DuplicateSymbol(t.to_string()).into());
            }
            symbols.push(sym);
        }
        if symbols.len() > Sym::MAX_SYMBOLS {
            return Err(GrammarError::TooManySymbols.into());
        }
        Ok(GeffertGrammar {
            symbols,
            rules: Vec::new(),
        })
    }

    /// Builds a grammar from right-hand sides such as `"A S' a"`, `"S' B"` or `"@"`.
    pub fn from_rules<I, T>(terminals: I, rules: &[&str]) -> Result<Self, GeffertError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut g = GeffertGrammar::new(terminals)?;
        for r in rules {
            let tokens: Vec<&str> = r.split_whitespace().filter(|t| *t != "@").collect();
            g.add_rhs(&tokens)?;
        }
        Ok(g)
    }

    pub fn add_rule(&mut self, rule: GeffertRule) -> usize {
        self.rules.push(rule);
        self.rules.len() - 1
    }

    /// Classifies and appends `S' -> rhs`. An empty `rhs` is `S' -> λ`; a single terminal
    /// after `S'` is the terminal-appending shape; anything else is bilateral. Alphabet
    /// violations inside `u` or `v` are left to [`validate_geffert`].
    pub fn add_rhs<S: AsRef<str>>(&mut self, rhs: &[S]) -> Result<usize, GeffertError> {
        if rhs.is_empty() {
            return Ok(self.add_rule(GeffertRule::Erase));
        }
        let syms = rhs
            .iter()
            .map(|t| {
                let t = t.as_ref();
                self.lookup(t)
                    .ok_or_else(|| GrammarError::UndeclaredSymbol(t.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut s_positions = syms.iter().enumerate().filter(|(_, &s)| s == SP).map(|(i, _)| i);
        let split = match (s_positions.next(), s_positions.next()) {
            (Some(i), None) => i,
            _ => return Err(GeffertError::MissingSPrime),
        };
        let u = syms[..split].to_vec();
        let right = &syms[split + 1..];
        let rule = match right {
            [a] if self.is_terminal(*a) => GeffertRule::AppendTerminal { u, a: *a },
            _ => GeffertRule::Bilateral {
                u,
                v: right.to_vec(),
            },
        };
        Ok(self.add_rule(rule))
    }

    pub fn rules(&self) -> &[GeffertRule] {
        &self.rules
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn terminals(&self) -> &[Symbol] {
        &self.symbols[NONTERMINALS.len()..]
    }

    pub fn is_terminal(&self, sym: Sym) -> bool {
        sym.index() >= NONTERMINALS.len()
    }

    pub fn name(&self, sym: Sym) -> &str {
        self.symbols[sym.index()].name()
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.symbols
            .iter()
            .position(|s| s.name() == name)
            .map(Sym::from_index)
    }

    pub fn s_prime(&self) -> Sym {
        SP
    }

    /// The fixed nonterminals in the order `A, B, C, D`.
    pub fn abcd(&self) -> [Sym; 4] {
        [A, B, C, D]
    }

    pub fn render_symbols(&self, syms: &[Sym]) -> String {
        if syms.is_empty() {
            return "@".to_string();
        }
        let names: Vec<&str> = syms.iter().map(|&s| self.name(s)).collect();
        names.join(" ")
    }

    /// `S' -> ...` for rule `index`.
    pub fn render_rule(&self, index: usize) -> String {
        format!("{S_PRIME} -> {}", self.render_symbols(&self.rules[index].rhs()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleIssue {
    pub rule: usize,
    pub message: String,
}

impl fmt::Display for RuleIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: {}", self.rule, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeffertReport {
    pub issues: Vec<RuleIssue>,
    /// False when no `S' -> λ` rule exists, so no derivation can end in a terminal word.
    pub can_terminate: bool,
}

impl GeffertReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

pub fn validate_geffert(g: &GeffertGrammar) -> GeffertReport {
    fn check(g: &GeffertGrammar, issues: &mut Vec<RuleIssue>, rule: usize, part: &str, syms: &[Sym], allowed: [Sym; 2]) {
        for &s in syms {
            if !allowed.contains(&s) {
                issues.push(RuleIssue {
                    rule,
                    message: format!(
                        "`{}` in {part} is outside {{{}, {}}}",
                        g.name(s),
                        g.name(allowed[0]),
                        g.name(allowed[1])
                    ),
                });
            }
        }
    }
    let mut issues = Vec::new();
    for (i, rule) in g.rules.iter().enumerate() {
        match rule {
            GeffertRule::AppendTerminal { u, a } => {
                check(g, &mut issues, i, "u", u, [A, C]);
                if !g.is_terminal(*a) {
                    issues.push(RuleIssue {
                        rule: i,
                        message: format!("`{}` is not a terminal", g.name(*a)),
                    });
                }
            }
            GeffertRule::Bilateral { u, v } => {
                check(g, &mut issues, i, "u", u, [A, C]);
                check(g, &mut issues, i, "v", v, [B, D]);
            }
            GeffertRule::Erase => {}
        }
    }
    GeffertReport {
        issues,
        can_terminate: g.rules.contains(&GeffertRule::Erase),
    }
}

/// One Geffert derivation step. Positions are 0-based; for erasures they name the left
/// symbol of the adjacent pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeffertStep {
    ApplyCf { rule: usize, position: usize },
    EraseAb { position: usize },
    EraseCd { position: usize },
}

impl fmt::Display for GeffertStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeffertStep::ApplyCf { rule, position } => write!(f, "cf {rule} @ {}", position + 1),
            GeffertStep::EraseAb { position } => write!(f, "erase-ab @ {}", position + 1),
            GeffertStep::EraseCd { position } => write!(f, "erase-cd @ {}", position + 1),
        }
    }
}

pub type GeffertTrace = Trace<GeffertStep>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeffertApplyError {
    #[error("no rule with index {0}")]
    UnknownRule(usize),
    #[error("position {} is out of range", .0 + 1)]
    OutOfRange(usize),
    #[error("position {} does not hold S'", .0 + 1)]
    NotSPrime(usize),
    #[error("positions {} and {} do not hold the pair to erase", .0 + 1, .0 + 2)]
    NoPair(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {source}")]
pub struct GeffertReplayError {
    pub step: usize,
    pub source: GeffertApplyError,
}

fn rewrite_into(form: &[Sym], at: usize, width: usize, replacement: &[Sym], out: &mut Vec<Sym>) {
    out.clear();
    out.extend_from_slice(&form[..at]);
    out.extend_from_slice(replacement);
    out.extend_from_slice(&form[at + width..]);
}

pub fn apply_geffert_step(
    g: &GeffertGrammar,
    form: &[Sym],
    step: GeffertStep,
) -> Result<SententialForm, GeffertApplyError> {
    let mut out = Vec::new();
    match step {
        GeffertStep::ApplyCf { rule, position } => {
            let rule = g.rules.get(rule).ok_or(GeffertApplyError::UnknownRule(rule))?;
            match form.get(position) {
                None => return Err(GeffertApplyError::OutOfRange(position)),
                Some(&s) if s != SP => return Err(GeffertApplyError::NotSPrime(position)),
                Some(_) => rewrite_into(form, position, 1, &rule.rhs(), &mut out),
            }
        }
        GeffertStep::EraseAb { position } | GeffertStep::EraseCd { position } => {
            let pair = if matches!(step, GeffertStep::EraseAb { .. }) { [A, B] } else { [C, D] };
            if position + 1 >= form.len() {
                return Err(GeffertApplyError::OutOfRange(position));
            }
            if form[position..position + 2] != pair {
                return Err(GeffertApplyError::NoPair(position));
            }
            rewrite_into(form, position, 2, &[], &mut out);
        }
    }
    Ok(out.into())
}

pub fn replay_geffert(g: &GeffertGrammar, trace: &GeffertTrace) -> Result<SententialForm, GeffertReplayError> {
    let mut form = trace.start.clone();
    for (i, &step) in trace.steps.iter().enumerate() {
        form = apply_geffert_step(g, &form, step).map_err(|source| GeffertReplayError { step: i + 1, source })?;
    }
    Ok(form)
}

pub(crate) struct GeffertExpander<'g> {
    rhs: Vec<Vec<Sym>>,
    _grammar: &'g GeffertGrammar,
}

impl<'g> GeffertExpander<'g> {
    pub fn new(g: &'g GeffertGrammar) -> Self {
        GeffertExpander {
            rhs: g.rules.iter().map(GeffertRule::rhs).collect(),
            _grammar: g,
        }
    }
}

impl Expand for GeffertExpander<'_> {
    type Label = GeffertStep;

    fn expand<F>(&self, form: &[Sym], max_len: usize, mut emit: F) -> (u64, ControlFlow<()>)
    where
        F: FnMut(GeffertStep, &[Sym]) -> ControlFlow<()>,
    {
        let mut pruned = 0u64;
        let mut buf = Vec::with_capacity(max_len.min(form.len() + 16));
        let s_count = form.iter().filter(|&&s| s == SP).count() as u64;
        for (rule, rhs) in self.rhs.iter().enumerate() {
            if s_count == 0 {
                break;
            }
            if form.len() - 1 + rhs.len() > max_len {
                pruned += s_count;
                continue;
            }
            for (position, _) in form.iter().enumerate().filter(|(_, &s)| s == SP) {
                rewrite_into(form, position, 1, rhs, &mut buf);
                if emit(GeffertStep::ApplyCf { rule, position }, &buf).is_break() {
                    return (pruned, ControlFlow::Break(()));
                }
            }
        }
        for (pair, make) in [
            ([A, B], (|position| GeffertStep::EraseAb { position }) as fn(usize) -> GeffertStep),
            ([C, D], |position| GeffertStep::EraseCd { position }),
        ] {
            for position in 0..form.len().saturating_sub(1) {
                if form[position..position + 2] == pair {
                    rewrite_into(form, position, 2, &[], &mut buf);
                    if emit(make(position), &buf).is_break() {
                        return (pruned, ControlFlow::Break(()));
                    }
                }
            }
        }
        (pruned, ControlFlow::Continue(()))
    }

    fn is_monotone(&self) -> bool {
        false
    }
}

/// Every one-step derivative of `form`, deduplicated by result, in step order.
pub fn geffert_successors(g: &GeffertGrammar, form: &[Sym]) -> Vec<(GeffertStep, SententialForm)> {
    let mut out: Vec<(GeffertStep, SententialForm)> = Vec::new();
    let _ = GeffertExpander::new(g).expand(form, usize::MAX, |step, child| {
        if !out.iter().any(|(_, f)| f.as_slice() == child) {
            out.push((step, child.into()));
        }
        ControlFlow::Continue(())
    });
    out
}

pub(crate) fn explore<V>(
    g: &GeffertGrammar,
    bounds: &EnumerationBounds,
    visit: V,
) -> (SearchTree<GeffertStep>, BoundedLanguage)
where
    V: FnMut(&SearchTree<GeffertStep>, usize) -> ControlFlow<()>,
{
    let (tree, _, language) = search::collect_language(
        &GeffertExpander::new(g),
        &[SP],
        bounds,
        |s| g.is_terminal(s),
        |s| g.name(s).to_string(),
        visit,
    );
    (tree, language)
}

pub fn enumerate_geffert(g: &GeffertGrammar, bounds: &EnumerationBounds) -> BoundedLanguage {
    explore(g, bounds, |_, _| ControlFlow::Continue(())).1
}

pub(crate) fn trace_to(tree: &SearchTree<GeffertStep>, node: usize) -> GeffertTrace {
    let path = tree.path(node);
    let mut trace = Trace::new(tree.form(path[0]).into());
    trace.steps = path[1..]
        .iter()
        .map(|&n| tree.label(n).expect("non-root node has a label"))
        .collect();
    trace
}

/// First derivation of `word` in breadth-first canonical order, if one exists within `bounds`.
pub fn find_geffert_trace<S: AsRef<str>>(
    g: &GeffertGrammar,
    word: &[S],
    bounds: &EnumerationBounds,
) -> Result<Option<GeffertTrace>, WordError> {
    let target = word
        .iter()
        .map(|t| {
            let t = t.as_ref();
            let s = g.lookup(t).ok_or_else(|| WordError::Undeclared(t.to_string()))?;
            if g.is_terminal(s) {
                Ok(s)
            } else {
                Err(WordError::NotTerminal(t.to_string()))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut hit = None;
    let (tree, _) = explore(g, bounds, |tree, node| {
        if tree.form(node) == target.as_slice() {
            hit = Some(node);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(hit.map(|node| trace_to(&tree, node)))
}

/// Whether the nonterminals of `form`, read left to right, spell a word of
/// `{A,C}* (S' | λ) {B,D}*`.
pub fn has_geffert_shape(form: &[Sym]) -> bool {
    // 0: in the {A,C} prefix, 1: after S', 2: in the {B,D} suffix.
    let mut phase = 0;
    for &s in form {
        match s {
            A | C if phase == 0 => {}
            SP if phase == 0 => phase = 1,
            B | D => phase = 2,
            A | C | SP => return false,
            _ => {}
        }
    }
    true
}
