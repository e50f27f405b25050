//! Text formats and the command-line front end for `scg-core`.

pub mod cli;
pub mod format;

pub use scg_core;
