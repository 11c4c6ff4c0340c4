//! Scoring: corpus BLEU, suggestion overlap, paired bootstrap significance
//! and grid aggregation.

mod bleu;
mod bootstrap;
mod overlap;
mod report;

pub use bleu::{bleu_corpus, BleuScore, BleuStats, MAX_ORDER, SIGNATURE};
pub use bootstrap::{paired_bootstrap, SignificanceResult, DEFAULT_BOOTSTRAP, DEFAULT_THRESHOLD};
pub use overlap::{
    suggestion_overlap, suggestion_overlap_with, OverlapAveraging, OverlapCounting, OverlapResult,
};
pub use report::{
    aggregate_report, AverageEntry, CellKey, CellResult, EvalReport, SignificanceEntry,
};
