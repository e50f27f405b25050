//! Scattered context grammars and the three-nonterminal construction for Geffert normal form.
//!
//! Everything here is pure computation over immutable values; text formats and the command
//! line live in the `scg` crate.
#![no_std]

extern crate alloc;

pub mod check;
pub mod derive;
pub mod form;
pub mod geffert;
pub mod grammar;
mod live;
mod parikh;
mod search;
pub mod showcase;
pub mod symbol;
pub mod transform;

pub use check::{check_geffert, check_lemma1, check_three_nt, CheckError, Family, Reach, SweepReport, Violation};
pub use derive::{
    apply_step, decide_membership, enumerate, find_applications, replay, successors,
    DerivationStep, DerivationTrace, MembershipVerdict,
};
pub use form::{SententialForm, Trace, Word};
pub use grammar::{compute_metrics, GrammarBuilder, GrammarError, GrammarMetrics, ScatteredContextGrammar, ScatteredProduction};
pub use search::{BoundedLanguage, EnumerationBounds};
pub use showcase::{example1, lemma1, lemma1_expected_lengths, ShowcaseError, ShowcaseParams};
pub use symbol::{Sym, Symbol, SymbolKind};
pub use transform::{simulate, transform, CountingCheck, CountingState, EncodingTable, Origin, TransformError, TransformOutput};
