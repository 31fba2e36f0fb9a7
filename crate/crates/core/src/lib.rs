//! Random substitution subshifts.
//!
//! A random substitution maps every letter to a finite set of words and
//! acts on words by choosing a realisation independently per letter. This
//! crate checks structural properties of such maps, enumerates their
//! languages, and computes or brackets the topological entropy of the
//! associated subshift.

pub mod budget;
pub mod bundled;
pub mod complexity;
pub mod document;
pub mod entropy;
pub mod error;
pub mod language;
pub mod parikh;
pub mod report;
mod runs;
mod serial;
pub mod structure;
pub mod substitution;
pub mod word;

pub use budget::Budget;
pub use document::{parse_spec, parse_spec_with_warnings, to_canonical_json};
pub use error::{Error, Result};
pub use language::{
    complexity_table, complexity_table_at, entropy_from_complexity, legal_words,
    legal_words_by_generation, subshift_language, ComplexityTable, Language, LanguageMode, default_margin,
};
pub use substitution::RandomSubstitution;
pub use word::{Letter, Word, WordSet};
