//! Rule-based political-leaning classification.
//!
//! The pipeline turns dependency-parsed news articles into per-noun stance
//! values and compares them against one stance vector per political class:
//!
//! 1. [`coref`] rewrites pronouns to their antecedent nouns.
//! 2. [`refres`] links every verb and adjective to its nearest noun in the
//!    dependency tree.
//! 3. [`stance`] averages descriptor valences per noun, per article and per
//!    corpus.
//! 4. [`space`] lays the per-class stance maps out over a shared noun index.
//! 5. [`classify`] picks the class whose vector is closest in cosine distance.
//!
//! [`corpus`] and [`evaluation`] handle ingestion, balancing, splitting and
//! scoring; [`pipeline`] wires the stages together.

pub mod classify;
pub mod conllu;
pub mod coref;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod pipeline;
pub mod refres;
pub mod space;
pub mod stance;
pub mod tree;

pub use classify::{cosine_distance, ClassificationResult, Classifier, Outcome, PredictionRecord};
pub use corpus::{Article, Leaning, QuarterKey};
pub use error::{Error, Result};
pub use refres::{MemoEntry, RefAssignment, SourceKind};
pub use space::{LeaningSpace, NounIndex};
pub use stance::{StanceMap, ValenceLexicon};
pub use tree::{DepSentence, DepToken, Upos};
