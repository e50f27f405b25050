//! The scattered context derivation relation and everything built on it: matching,
//! one-step successors, bounded enumeration, membership and trace replay.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::ControlFlow;

use hashbrown::HashSet;
use rustc_hash::FxBuildHasher;

use crate::form::{SententialForm, Trace, Word};
use crate::grammar::{ScatteredContextGrammar, ScatteredProduction};
use crate::live::Liveness;
use crate::search::{self, BoundedLanguage, EnumerationBounds, Expand, SearchStats, SearchTree};
use crate::symbol::Sym;

/// One application of a production: which production, and where its left-hand symbols sit.
///
/// Positions are 0-based and strictly increasing. Text renderings use 1-based positions.
/// Ordering is by production index, then lexicographically by positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerivationStep {
    pub production: usize,
    pub positions: Vec<usize>,
}

impl DerivationStep {
    pub fn new(production: usize, positions: Vec<usize>) -> Self {
        DerivationStep {
            production,
            positions,
        }
    }
}

impl fmt::Display for DerivationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} @", self.production)?;
        for p in &self.positions {
            write!(f, " {}", p + 1)?;
        }
        Ok(())
    }
}

pub type DerivationTrace = Trace<DerivationStep>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApplyError {
    #[error("no production with index {0}")]
    UnknownProduction(usize),
    #[error("step names {got} positions but the production rewrites {expected} symbols")]
    WrongArity { expected: usize, got: usize },
    #[error("position {} is out of range for a form of length {len}", .position + 1)]
    PositionOutOfRange { position: usize, len: usize },
    #[error("positions are not strictly increasing")]
    NotIncreasing,
    #[error("position {} holds `{found}`, expected `{expected}`", .position + 1)]
    SymbolMismatch {
        position: usize,
        expected: String,
        found: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {source}")]
pub struct ReplayError {
    /// 1-based index of the failing step.
    pub step: usize,
    pub source: ApplyError,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("`{0}` is not a declared symbol")]
    Undeclared(String),
    #[error("`{0}` is a nonterminal")]
    NotTerminal(String),
}

/// Calls `f` with every strictly increasing position tuple whose symbols spell `lhs`,
/// in lexicographic order.
pub(crate) fn for_each_match<F>(form: &[Sym], lhs: &[Sym], mut f: F) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let n = lhs.len();
    if n == 0 || n > form.len() {
        return ControlFlow::Continue(());
    }
    // last[i]: the rightmost position lhs[i] may take while lhs[i+1..] still fits after it.
    let mut last = vec![0usize; n];
    let mut limit = form.len();
    for i in (0..n).rev() {
        match form[..limit].iter().rposition(|&s| s == lhs[i]) {
            Some(p) => {
                last[i] = p;
                limit = p;
            }
            None => return ControlFlow::Continue(()),
        }
    }

    fn descend<F: FnMut(&[usize]) -> ControlFlow<()>>(
        form: &[Sym],
        lhs: &[Sym],
        last: &[usize],
        positions: &mut [usize],
        i: usize,
        from: usize,
        f: &mut F,
    ) -> ControlFlow<()> {
        for p in from..=last[i] {
            if form[p] != lhs[i] {
                continue;
            }
            positions[i] = p;
            if i + 1 == lhs.len() {
                f(positions)?;
            } else {
                descend(form, lhs, last, positions, i + 1, p + 1, f)?;
            }
        }
        ControlFlow::Continue(())
    }

    let mut positions = vec![0usize; n];
    descend(form, lhs, &last, &mut positions, 0, 0, &mut f)
}

/// Number of strictly increasing tuples matching `lhs`, saturating.
pub(crate) fn count_matches(form: &[Sym], lhs: &[Sym]) -> u64 {
    let mut ways = vec![0u64; lhs.len() + 1];
    ways[0] = 1;
    for &s in form {
        for j in (0..lhs.len()).rev() {
            if lhs[j] == s {
                ways[j + 1] = ways[j + 1].saturating_add(ways[j]);
            }
        }
    }
    ways[lhs.len()]
}

/// Writes the result of rewriting `positions` of `form` by `production` into `out`.
fn rewrite_into(form: &[Sym], production: &ScatteredProduction, positions: &[usize], out: &mut Vec<Sym>) {
    out.clear();
    let mut next = 0;
    for (&p, x) in positions.iter().zip(production.rhs()) {
        out.extend_from_slice(&form[next..p]);
        out.extend_from_slice(x);
        next = p + 1;
    }
    out.extend_from_slice(&form[next..]);
}

/// All applications of production `index` of `g` to `form`, in canonical order.
pub fn find_applications(
    g: &ScatteredContextGrammar,
    form: &[Sym],
    index: usize,
) -> Vec<DerivationStep> {
    let Some(p) = g.production(index) else {
        return Vec::new();
    };
    let mut steps = Vec::new();
    let _ = for_each_match(form, p.lhs(), |pos| {
        steps.push(DerivationStep::new(index, pos.to_vec()));
        ControlFlow::Continue(())
    });
    steps
}

pub fn apply_step(
    g: &ScatteredContextGrammar,
    form: &[Sym],
    step: &DerivationStep,
) -> Result<SententialForm, ApplyError> {
    let p = g
        .production(step.production)
        .ok_or(ApplyError::UnknownProduction(step.production))?;
    if step.positions.len() != p.width() {
        return Err(ApplyError::WrongArity {
            expected: p.width(),
            got: step.positions.len(),
        });
    }
    for (i, &pos) in step.positions.iter().enumerate() {
        if pos >= form.len() {
            return Err(ApplyError::PositionOutOfRange {
                position: pos,
                len: form.len(),
            });
        }
        if i > 0 && pos <= step.positions[i - 1] {
            return Err(ApplyError::NotIncreasing);
        }
    }
    for (&pos, &expected) in step.positions.iter().zip(p.lhs()) {
        if form[pos] != expected {
            return Err(ApplyError::SymbolMismatch {
                position: pos,
                expected: g.name(expected).to_string(),
                found: g.name(form[pos]).to_string(),
            });
        }
    }
    let mut out = Vec::with_capacity(p.result_len(form.len()));
    rewrite_into(form, p, &step.positions, &mut out);
    Ok(out.into())
}

/// Every one-step derivative of `form`, one entry per distinct resulting form.
///
/// Each result keeps the canonically smallest step producing it; entries are in step order.
pub fn successors(
    g: &ScatteredContextGrammar,
    form: &[Sym],
) -> Vec<(DerivationStep, SententialForm)> {
    let mut seen: HashSet<Vec<Sym>, FxBuildHasher> = HashSet::default();
    let mut out = Vec::new();
    let mut buf = Vec::new();
    for (index, p) in g.productions().iter().enumerate() {
        let _ = for_each_match(form, p.lhs(), |pos| {
            rewrite_into(form, p, pos, &mut buf);
            if !seen.contains(&buf) {
                seen.insert(buf.clone());
                out.push((DerivationStep::new(index, pos.to_vec()), buf.clone().into()));
            }
            ControlFlow::Continue(())
        });
    }
    out
}

pub fn replay(g: &ScatteredContextGrammar, trace: &DerivationTrace) -> Result<SententialForm, ReplayError> {
    let mut form = trace.start.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        form = apply_step(g, &form, step).map_err(|source| ReplayError { step: i + 1, source })?;
    }
    Ok(form)
}

/// Successor generator over a grammar; labels are production indices.
pub(crate) struct ScgExpander<'g> {
    pub grammar: &'g ScatteredContextGrammar,
    monotone: bool,
    live: Option<Liveness>,
}

impl<'g> ScgExpander<'g> {
    pub fn new(grammar: &'g ScatteredContextGrammar) -> Self {
        ScgExpander {
            grammar,
            monotone: !grammar.is_erasing(),
            live: None,
        }
    }

    /// Also drops successors that can no longer derive a terminal word.
    pub fn pruning_dead(grammar: &'g ScatteredContextGrammar) -> Self {
        ScgExpander {
            live: Liveness::new(grammar),
            ..Self::new(grammar)
        }
    }
}

impl Expand for ScgExpander<'_> {
    type Label = u32;

    fn expand<F>(&self, form: &[Sym], max_len: usize, mut emit: F) -> (u64, ControlFlow<()>)
    where
        F: FnMut(u32, &[Sym]) -> ControlFlow<()>,
    {
        let mut pruned = 0u64;
        let mut buf = Vec::with_capacity(max_len.min(form.len() + 16));
        for (index, p) in self.grammar.productions().iter().enumerate() {
            if p.width() > form.len() {
                continue;
            }
            // The result length does not depend on where the production matches.
            if p.result_len(form.len()) > max_len {
                pruned = pruned.saturating_add(count_matches(form, p.lhs()));
                continue;
            }
            let flow = for_each_match(form, p.lhs(), |pos| {
                rewrite_into(form, p, pos, &mut buf);
                emit(index as u32, &buf)
            });
            if flow.is_break() {
                return (pruned, flow);
            }
        }
        (pruned, ControlFlow::Continue(()))
    }

    fn is_monotone(&self) -> bool {
        self.monotone
    }

    fn admits(&self, form: &[Sym]) -> bool {
        self.live.as_ref().is_none_or(|l| l.is_live(form))
    }
}

/// The canonically smallest step turning `parent` into `child`.
pub(crate) fn step_between(
    g: &ScatteredContextGrammar,
    parent: &[Sym],
    child: &[Sym],
    production: usize,
) -> DerivationStep {
    let p = &g.productions()[production];
    let mut buf = Vec::with_capacity(child.len());
    let mut found = None;
    let _ = for_each_match(parent, p.lhs(), |pos| {
        rewrite_into(parent, p, pos, &mut buf);
        if buf == child {
            found = Some(pos.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    DerivationStep::new(production, found.expect("child was discovered from parent"))
}

pub(crate) fn trace_to(
    g: &ScatteredContextGrammar,
    tree: &SearchTree<u32>,
    node: usize,
) -> DerivationTrace {
    let path = tree.path(node);
    let mut trace = Trace::new(tree.form(path[0]).into());
    for pair in path.windows(2) {
        let production = tree.label(pair[1]).expect("non-root node has a label") as usize;
        trace
            .steps
            .push(step_between(g, tree.form(pair[0]), tree.form(pair[1]), production));
    }
    trace
}

/// Searches from the start symbol. With `prune_dead`, forms that can no longer derive a
/// terminal word are neither visited nor expanded.
pub(crate) fn explore<V>(
    g: &ScatteredContextGrammar,
    bounds: &EnumerationBounds,
    prune_dead: bool,
    visit: V,
) -> (SearchTree<u32>, SearchStats, BoundedLanguage)
where
    V: FnMut(&SearchTree<u32>, usize) -> ControlFlow<()>,
{
    let expander = if prune_dead {
        ScgExpander::pruning_dead(g)
    } else {
        ScgExpander::new(g)
    };
    search::collect_language(
        &expander,
        &[g.start()],
        bounds,
        |s| g.is_terminal(s),
        |s| g.name(s).to_string(),
        visit,
    )
}

/// Breadth-first enumeration of `L(g)` within `bounds`.
///
/// Forms from which no terminal word is derivable are skipped and not counted as visited.
pub fn enumerate(g: &ScatteredContextGrammar, bounds: &EnumerationBounds) -> BoundedLanguage {
    explore(g, bounds, true, |_, _| ControlFlow::Continue(())).2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipVerdict {
    Member(DerivationTrace),
    /// The search covered every derivation that could yield a word of this length.
    NotMemberExhaustive,
    Unknown,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipVerdict::Member(_))
    }
}

/// Resolves word tokens against the terminal alphabet of `g`.
pub fn resolve_word<S: AsRef<str>>(g: &ScatteredContextGrammar, word: &[S]) -> Result<Vec<Sym>, WordError> {
    word.iter()
        .map(|t| {
            let t = t.as_ref();
            let sym = g.lookup(t).ok_or_else(|| WordError::Undeclared(t.to_string()))?;
            if g.is_terminal(sym) {
                Ok(sym)
            } else {
                Err(WordError::NotTerminal(t.to_string()))
            }
        })
        .collect()
}

pub fn decide_membership<S: AsRef<str>>(
    g: &ScatteredContextGrammar,
    word: &[S],
    bounds: &EnumerationBounds,
) -> Result<MembershipVerdict, WordError> {
    let target = resolve_word(g, word)?;
    let expander = ScgExpander::pruning_dead(g);
    let monotone = expander.is_monotone();
    let mut effective = *bounds;
    if monotone {
        // Nothing longer than the word can shrink back to it.
        effective.max_form_length = bounds.max_form_length.min(target.len());
    }
    let mut hit = None;
    let (tree, stats) = search::breadth_first(&expander, &[g.start()], &effective, |tree, node| {
        if tree.form(node) == target.as_slice() {
            hit = Some(node);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if let Some(node) = hit {
        return Ok(MembershipVerdict::Member(trace_to(g, &tree, node)));
    }
    let covered = bounds.max_form_length >= target.len() && stats.exhaustive(monotone);
    Ok(if covered {
        MembershipVerdict::NotMemberExhaustive
    } else {
        MembershipVerdict::Unknown
    })
}

/// Renders a form over `g` as tokens, `@` when empty.
pub fn render_form(g: &ScatteredContextGrammar, form: &[Sym]) -> String {
    g.render_symbols(form)
}

/// Converts an all-terminal form to a [`Word`]; `None` if a nonterminal remains.
pub fn form_to_word(g: &ScatteredContextGrammar, form: &[Sym]) -> Option<Word> {
    form.iter()
        .map(|&s| g.is_terminal(s).then(|| g.name(s).to_string()))
        .collect::<Option<Vec<_>>>()
        .map(Word::new)
}
