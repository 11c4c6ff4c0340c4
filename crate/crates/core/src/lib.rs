//! Retrieval-augmented translation toolkit.
//!
//! The crate covers the data side of retrieval-augmented translation (RAT):
//!
//! * [`corpus`]: loading and validating translation memories, the retrieval
//!   analyzer and the mteval-13a tokenizer used for scoring.
//! * [`bm25`]: an immutable in-memory Okapi BM25 index over TM source
//!   sentences with a versioned on-disk format.
//! * [`augment`]: turning fuzzy matches into augmented inputs, either the
//!   deterministic top-k or a seeded sample of k from a larger top-N pool.
//! * [`scenario`]: relevant / less-relevant TM settings for a test domain.
//! * [`eval`]: corpus BLEU (13a, exp smoothing), suggestion overlap, paired
//!   bootstrap significance and grid aggregation.
//! * [`pipeline`]: the translator seam and the experiment runner.

pub mod augment;
pub mod bm25;
pub mod corpus;
mod error;
pub mod eval;
pub mod pipeline;
pub mod scenario;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};

pub use augment::{AugmentationConfig, AugmentedExample, SamplingMode};
pub use bm25::{Bm25Params, FuzzyMatch, TmIndex};
pub use corpus::{CorpusFormat, SentencePair, TranslationMemory};
pub use eval::{BleuScore, EvalReport, SignificanceResult};
pub use scenario::{Relevance, ScenarioSpec};
