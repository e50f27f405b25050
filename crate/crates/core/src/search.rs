//! Breadth-first exploration of sentential forms with global deduplication.
//!
//! Nodes are stored in discovery order, which for a breadth-first search is also the
//! expansion order, so the arena doubles as the queue. A form is expanded at most once.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::hash::BuildHasher;
use core::ops::ControlFlow;

use hashbrown::HashTable;
use rustc_hash::FxBuildHasher;

use crate::form::Word;
use crate::symbol::Sym;

/// Limits for a bounded search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnumerationBounds {
    /// Successor forms longer than this are pruned.
    pub max_form_length: usize,
    /// Maximal derivation length, in steps.
    pub max_depth: usize,
    /// Maximal number of distinct forms visited, the start form included.
    pub max_forms: usize,
}

impl EnumerationBounds {
    pub const DEFAULT_MAX_FORM_LENGTH: usize = 24;
    pub const DEFAULT_MAX_FORMS: usize = 1_000_000;

    /// Depth defaults to four times the form length.
    pub fn new(max_form_length: usize) -> Self {
        EnumerationBounds {
            max_form_length,
            max_depth: 4 * max_form_length,
            max_forms: Self::DEFAULT_MAX_FORMS,
        }
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn with_max_forms(mut self, max_forms: usize) -> Self {
        self.max_forms = max_forms.max(1);
        self
    }
}

impl Default for EnumerationBounds {
    fn default() -> Self {
        Self::new(Self::DEFAULT_MAX_FORM_LENGTH)
    }
}

/// Terminal words found by a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedLanguage {
    pub words: BTreeSet<Word>,
    /// True only when the search provably found every word within the length bound.
    pub exhaustive: bool,
    /// Distinct forms visited, the start form included.
    pub visited_forms: usize,
    /// Number of successor applications discarded for exceeding the length bound.
    pub pruned_forms: u64,
}

impl BoundedLanguage {
    /// Words of at most `max_len` tokens.
    pub fn words_up_to(&self, max_len: usize) -> BTreeSet<Word> {
        self.words
            .iter()
            .filter(|w| w.len() <= max_len)
            .cloned()
            .collect()
    }
}

/// One-step successor generator for some rewriting system.
pub(crate) trait Expand {
    /// Recorded with each discovered node; identifies the step class that produced it.
    type Label: Copy;

    /// Calls `emit` for every successor of `form` of length at most `max_len`, in canonical
    /// step order. Returns how many successors were discarded for length, together with
    /// whether `emit` asked to stop.
    fn expand<F>(&self, form: &[Sym], max_len: usize, emit: F) -> (u64, ControlFlow<()>)
    where
        F: FnMut(Self::Label, &[Sym]) -> ControlFlow<()>;

    /// Whether no step ever shortens a form.
    fn is_monotone(&self) -> bool;

    /// Whether a newly generated form is worth visiting. Rejected forms must not lead to any
    /// terminal word.
    fn admits(&self, _form: &[Sym]) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct SearchStats {
    pub pruned: u64,
    pub depth_limited: bool,
    pub budget_exhausted: bool,
    pub stopped: bool,
}

impl SearchStats {
    /// Whether every form of length at most the bound that is reachable was visited.
    pub fn exhaustive(&self, monotone: bool) -> bool {
        !self.depth_limited
            && !self.budget_exhausted
            && !self.stopped
            && (monotone || self.pruned == 0)
    }
}

pub(crate) const ROOT: u32 = u32::MAX;

pub(crate) struct SearchTree<L> {
    forms: Vec<Box<[Sym]>>,
    parents: Vec<u32>,
    labels: Vec<Option<L>>,
    depths: Vec<u32>,
    index: HashTable<u32>,
    hasher: FxBuildHasher,
}

impl<L: Copy> SearchTree<L> {
    fn new() -> Self {
        SearchTree {
            forms: Vec::new(),
            parents: Vec::new(),
            labels: Vec::new(),
            depths: Vec::new(),
            index: HashTable::new(),
            hasher: FxBuildHasher,
        }
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn form(&self, node: usize) -> &[Sym] {
        &self.forms[node]
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        match self.parents[node] {
            ROOT => None,
            p => Some(p as usize),
        }
    }

    pub fn label(&self, node: usize) -> Option<L> {
        self.labels[node]
    }

    /// Node ids from the root to `node`, inclusive.
    pub fn path(&self, node: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = Some(node);
        while let Some(n) = cur {
            path.push(n);
            cur = self.parent(n);
        }
        path.reverse();
        path
    }

    fn contains(&self, form: &[Sym]) -> bool {
        let hash = self.hasher.hash_one(form);
        self.index
            .find(hash, |&i| &*self.forms[i as usize] == form)
            .is_some()
    }

    /// Inserts `form` if unseen; returns its node id when it was new.
    fn insert(&mut self, form: &[Sym], parent: u32, label: Option<L>, depth: u32) -> Option<usize> {
        let hash = self.hasher.hash_one(form);
        let forms = &self.forms;
        if self
            .index
            .find(hash, |&i| &*forms[i as usize] == form)
            .is_some()
        {
            return None;
        }
        let id = self.forms.len() as u32;
        let forms = &self.forms;
        let hasher = &self.hasher;
        self.index
            .insert_unique(hash, id, |&i| hasher.hash_one(&*forms[i as usize]));
        self.forms.push(form.into());
        self.parents.push(parent);
        self.labels.push(label);
        self.depths.push(depth);
        Some(id as usize)
    }
}

/// Runs a breadth-first search from `start`. `visit` sees every newly discovered node,
/// the start node included, and may stop the search.
pub(crate) fn breadth_first<E, V>(
    expander: &E,
    start: &[Sym],
    bounds: &EnumerationBounds,
    mut visit: V,
) -> (SearchTree<E::Label>, SearchStats)
where
    E: Expand,
    V: FnMut(&SearchTree<E::Label>, usize) -> ControlFlow<()>,
{
    let mut tree = SearchTree::new();
    let mut stats = SearchStats::default();
    let max_forms = bounds.max_forms.max(1);
    let root = tree
        .insert(start, ROOT, None, 0)
        .expect("empty tree accepts the root");
    if visit(&tree, root).is_break() {
        stats.stopped = true;
        return (tree, stats);
    }

    let mut scratch: Vec<Sym> = Vec::new();
    let mut cursor = 0;
    while cursor < tree.len() {
        let depth = tree.depths[cursor];
        scratch.clear();
        scratch.extend_from_slice(&tree.forms[cursor]);

        if depth as usize >= bounds.max_depth {
            // Only record whether the depth bound hides anything new.
            let (pruned, flow) = expander.expand(&scratch, bounds.max_form_length, |_, child| {
                if tree.contains(child) || !expander.admits(child) {
                    ControlFlow::Continue(())
                } else {
                    ControlFlow::Break(())
                }
            });
            stats.pruned += pruned;
            if flow.is_break() {
                stats.depth_limited = true;
            }
            cursor += 1;
            continue;
        }

        let parent = cursor as u32;
        let (pruned, flow) = expander.expand(&scratch, bounds.max_form_length, |label, child| {
            if tree.contains(child) || !expander.admits(child) {
                return ControlFlow::Continue(());
            }
            if tree.len() >= max_forms {
                stats.budget_exhausted = true;
                return ControlFlow::Break(());
            }
            let node = tree
                .insert(child, parent, Some(label), depth + 1)
                .expect("checked absent above");
            if visit(&tree, node).is_break() {
                stats.stopped = true;
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        stats.pruned += pruned;
        if flow.is_break() {
            break;
        }
        cursor += 1;
    }
    (tree, stats)
}

/// Collects terminal forms as words while searching.
pub(crate) fn collect_language<E, N, V>(
    expander: &E,
    start: &[Sym],
    bounds: &EnumerationBounds,
    is_terminal: impl Fn(Sym) -> bool,
    name: N,
    mut visit: V,
) -> (SearchTree<E::Label>, SearchStats, BoundedLanguage)
where
    E: Expand,
    N: Fn(Sym) -> alloc::string::String,
    V: FnMut(&SearchTree<E::Label>, usize) -> ControlFlow<()>,
{
    let mut words = BTreeSet::new();
    let (tree, stats) = breadth_first(expander, start, bounds, |tree, node| {
        let form = tree.form(node);
        if form.iter().all(|&s| is_terminal(s)) {
            words.insert(Word::new(form.iter().map(|&s| name(s)).collect()));
        }
        visit(tree, node)
    });
    let language = BoundedLanguage {
        words,
        exhaustive: stats.exhaustive(expander.is_monotone()),
        visited_forms: tree.len(),
        pruned_forms: stats.pruned,
    };
    (tree, stats, language)
}
