//! Parallel corpora and translation memories, plus the two tokenizations the
//! toolkit relies on.

mod analyzer;
mod io;
mod tok13a;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use analyzer::analyze_for_index;
pub use io::{load_corpus, read_corpus, write_corpus, CorpusFormat};
pub use tok13a::{tokenize_13a, tokenize_13a_string};
pub(crate) use tok13a::is_split_space;

/// One aligned sentence pair with its domain label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub id: String,
    pub domain: String,
    pub source: String,
    pub target: String,
}

impl SentencePair {
    pub fn new(
        id: impl Into<String>,
        domain: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            domain: domain.into(),
            source: source.into(),
            target: target.into(),
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.source.trim().is_empty() {
            return Err(format!("pair {:?} has an empty source", self.id));
        }
        if self.target.trim().is_empty() {
            return Err(format!("pair {:?} has an empty target", self.id));
        }
        Ok(())
    }
}

/// A named, validated, non-empty list of sentence pairs.
///
/// Ids are unique and `domains` is exactly the set of labels used by `pairs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationMemory {
    name: String,
    pairs: Vec<SentencePair>,
    domains: BTreeSet<String>,
}

impl TranslationMemory {
    pub fn new(name: impl Into<String>, pairs: Vec<SentencePair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Validation("translation memory is empty".into()));
        }
        let mut seen: HashMap<&str, usize> = HashMap::with_capacity(pairs.len());
        for (pos, pair) in pairs.iter().enumerate() {
            pair.check().map_err(Error::Validation)?;
            if let Some(first) = seen.insert(pair.id.as_str(), pos) {
                return Err(Error::Validation(format!(
                    "duplicate id {:?} at record {} (first at record {})",
                    pair.id,
                    pos + 1,
                    first + 1
                )));
            }
        }
        let domains = pairs.iter().map(|p| p.domain.clone()).collect();
        Ok(Self {
            name: name.into(),
            pairs,
            domains,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn domains(&self) -> &BTreeSet<String> {
        &self.domains
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn into_pairs(self) -> Vec<SentencePair> {
        self.pairs
    }
}
