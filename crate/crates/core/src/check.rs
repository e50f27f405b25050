//! Invariant sweeps: explore every reachable form within bounds and test a per-form property.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;
use core::str::FromStr;

use crate::derive::{self, DerivationTrace};
use crate::geffert::{self, GeffertGrammar, GeffertTrace};
use crate::grammar::ScatteredContextGrammar;
use crate::search::{BoundedLanguage, EnumerationBounds};
use crate::symbol::Sym;
use crate::transform::{CountingCheck, CountingState, Origin};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `|x|_B = 2k`, `|x|_A = k + i - j`, `|x|_S = 1 + 2i - 3j`.
    ThreeNt,
    /// `|x|_Y + |x|_X3 <= 1` and `|x|_X2 <= 1`.
    Lemma1,
    /// Nonterminals spell `{A,C}* (S' | λ) {B,D}*`.
    Geffert,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::ThreeNt, Family::Lemma1, Family::Geffert];

    pub fn name(self) -> &'static str {
        match self {
            Family::ThreeNt => "three-nt",
            Family::Lemma1 => "lemma1",
            Family::Geffert => "geffert",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown family `{0}` (expected three-nt, lemma1 or geffert)")]
pub struct UnknownFamily(pub String);

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| UnknownFamily(s.to_string()))
    }
}

/// Which forms a sweep visits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Reach {
    /// Every reachable form within bounds.
    #[default]
    All,
    /// Only forms that may still derive a terminal word, as in enumeration.
    Productive,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("grammar does not declare nonterminal `{0}`")]
    MissingNonterminal(&'static str),
    #[error("nonterminal `{0}` is outside the family")]
    ExtraNonterminal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation<T> {
    pub message: String,
    /// Derivation of the violating form from the start symbol.
    pub trace: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport<T> {
    pub visited: usize,
    pub violations: usize,
    pub first: Option<Violation<T>>,
    pub language: BoundedLanguage,
}

impl<T> SweepReport<T> {
    pub fn is_clean(&self) -> bool {
        self.violations == 0
    }
}

fn nonterminal(g: &ScatteredContextGrammar, name: &'static str) -> Result<Sym, CheckError> {
    g.lookup(name)
        .filter(|&s| !g.is_terminal(s))
        .ok_or(CheckError::MissingNonterminal(name))
}

fn sweep<P>(
    g: &ScatteredContextGrammar,
    bounds: &EnumerationBounds,
    reach: Reach,
    mut per_node: P,
) -> SweepReport<DerivationTrace>
where
    P: FnMut(Option<usize>, Option<usize>, &[Sym]) -> Option<String>,
{
    let mut violations = 0;
    let mut first = None;
    let (tree, _, language) = derive::explore(g, bounds, reach == Reach::Productive, |tree, node| {
        let production = tree.label(node).map(|p| p as usize);
        if let Some(message) = per_node(tree.parent(node), production, tree.form(node)) {
            violations += 1;
            if first.is_none() {
                first = Some((node, message));
            }
        }
        ControlFlow::Continue(())
    });
    SweepReport {
        visited: tree.len(),
        violations,
        first: first.map(|(node, message)| Violation {
            message,
            trace: derive::trace_to(g, &tree, node),
        }),
        language,
    }
}

/// Checks the counting invariant on a grammar over `{S, A, B}`. `i` counts applications of
/// productions with left-hand side `(S)`, `j` those with left-hand side `(S, S, S, A)`.
pub fn check_three_nt(
    g: &ScatteredContextGrammar,
    bounds: &EnumerationBounds,
    reach: Reach,
) -> Result<SweepReport<DerivationTrace>, CheckError> {
    let (s, a) = (nonterminal(g, "S")?, nonterminal(g, "A")?);
    nonterminal(g, "B")?;
    if let Some(x) = g.nonterminals().iter().find(|x| !["S", "A", "B"].contains(&x.name())) {
        return Err(CheckError::ExtraNonterminal(x.name().to_string()));
    }
    let check = CountingCheck::for_grammar(g).ok_or(CheckError::MissingNonterminal("S"))?;
    let origins: Vec<Option<Origin>> = g
        .productions()
        .iter()
        .map(|p| match p.lhs() {
            [x] if *x == s => Some(Origin::Init),
            [x, y, z, w] if [*x, *y, *z, *w] == [s, s, s, a] => Some(Origin::Final),
            _ => None,
        })
        .collect();
    let mut states: Vec<CountingState> = Vec::new();
    Ok(sweep(g, bounds, reach, |parent, production, form| {
        let mut cs = parent.map(|p| states[p]).unwrap_or_default();
        if let Some(origin) = production.and_then(|p| origins[p]) {
            cs = cs.after(origin);
        }
        states.push(cs);
        (!check.holds(form, cs)).then(|| format!("counting invariant fails with i={}, j={}", cs.i, cs.j))
    }))
}

/// Checks marker exclusivity on the twelve-nonterminal family.
pub fn check_lemma1(
    g: &ScatteredContextGrammar,
    bounds: &EnumerationBounds,
    reach: Reach,
) -> Result<SweepReport<DerivationTrace>, CheckError> {
    let y = nonterminal(g, "Y")?;
    let x2 = nonterminal(g, "X2")?;
    let x3 = nonterminal(g, "X3")?;
    Ok(sweep(g, bounds, reach, |_, _, form| {
        let count = |s: Sym| form.iter().filter(|&&x| x == s).count();
        let (ny, nx2, nx3) = (count(y), count(x2), count(x3));
        if ny + nx3 > 1 {
            Some(format!("|Y| + |X3| = {}", ny + nx3))
        } else if nx2 > 1 {
            Some(format!("|X2| = {nx2}"))
        } else {
            None
        }
    }))
}

/// Checks the nonterminal shape of every reachable Geffert form.
pub fn check_geffert(g: &GeffertGrammar, bounds: &EnumerationBounds) -> SweepReport<GeffertTrace> {
    let mut violations = 0;
    let mut first = None;
    let (tree, language) = geffert::explore(g, bounds, |tree, node| {
        if !geffert::has_geffert_shape(tree.form(node)) {
            violations += 1;
            first.get_or_insert(node);
        }
        ControlFlow::Continue(())
    });
    SweepReport {
        visited: tree.len(),
        violations,
        first: first.map(|node| Violation {
            message: format!("form {} is out of shape", g.render_symbols(tree.form(node))),
            trace: geffert::trace_to(&tree, node),
        }),
        language,
    }
}
