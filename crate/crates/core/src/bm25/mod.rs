//! Okapi BM25 retrieval over translation-memory source sentences.
//!
//! Scoring uses the Lucene variant:
//!
//! ```text
//! idf(t)      = ln(1 + (N - df + 0.5) / (df + 0.5))
//! score(q, d) = Σ_{t ∈ set(q)} idf(t) · f(t,d)·(k1+1) / (f(t,d) + k1·(1 - b + b·|d|/avgdl))
//! ```
//!
//! Repeated query terms count once. Results with score 0 are never
//! returned, and equal scores are ordered by ascending pair id.

mod persist;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{analyze_for_index, SentencePair, TranslationMemory};
use crate::{Error, Result};

pub use persist::INDEX_MAGIC;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self> {
        let p = Self { k1, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k1.is_finite() && self.k1 >= 0.0) {
            return Err(Error::Config(format!("k1 must be finite and >= 0, got {}", self.k1)));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(Error::Config(format!("b must lie in [0, 1], got {}", self.b)));
        }
        Ok(())
    }
}

/// One retrieved TM entry. `target` is the suggestion handed to a translator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyMatch {
    pub pair_id: String,
    pub score: f64,
    pub rank: usize,
    pub source: String,
    pub target: String,
    pub domain: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocMeta {
    pub pair_id: String,
    pub domain: String,
    pub source: String,
    pub target: String,
}

/// Immutable inverted index with BM25 statistics.
///
/// Documents are numbered `0..doc_count` in TM order; postings for each term
/// are sorted by document number.
#[derive(Debug, Clone, PartialEq)]
pub struct TmIndex {
    params: Bm25Params,
    postings: HashMap<String, Vec<Posting>>,
    doc_lengths: Vec<u32>,
    docs: Vec<DocMeta>,
    avg_doc_length: f64,
}

/// Inverse document frequency for a term seen in `df` of `n` documents.
pub fn idf_for(n: usize, df: usize) -> f64 {
    let n = n as f64;
    let df = df as f64;
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

impl TmIndex {
    /// Index the source side of every pair in `tm`.
    pub fn build(tm: &TranslationMemory, params: Bm25Params) -> Result<Self> {
        Self::from_pairs(tm.pairs().iter(), params)
    }

    pub(crate) fn from_pairs<'a>(
        pairs: impl IntoIterator<Item = &'a SentencePair>,
        params: Bm25Params,
    ) -> Result<Self> {
        params.validate()?;
        let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
        let mut doc_lengths = Vec::new();
        let mut docs = Vec::new();
        let mut total: u64 = 0;
        for pair in pairs {
            let doc = u32::try_from(docs.len())
                .map_err(|_| Error::Validation("too many documents for one index".into()))?;
            let terms = analyze_for_index(&pair.source);
            if terms.is_empty() {
                return Err(Error::Validation(format!(
                    "pair {:?} has no indexable terms in its source",
                    pair.id
                )));
            }
            let len = u32::try_from(terms.len())
                .map_err(|_| Error::Validation(format!("pair {:?} is too long", pair.id)))?;
            let mut tfs: HashMap<String, u32> = HashMap::new();
            for term in terms {
                *tfs.entry(term).or_default() += 1;
            }
            for (term, tf) in tfs {
                postings.entry(term).or_default().push(Posting { doc, tf });
            }
            total += u64::from(len);
            doc_lengths.push(len);
            docs.push(DocMeta {
                pair_id: pair.id.clone(),
                domain: pair.domain.clone(),
                source: pair.source.clone(),
                target: pair.target.clone(),
            });
        }
        if docs.is_empty() {
            return Err(Error::Validation("cannot index an empty memory".into()));
        }
        let avg_doc_length = total as f64 / docs.len() as f64;
        Ok(Self {
            params,
            postings,
            doc_lengths,
            docs,
            avg_doc_length,
        })
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    pub fn doc_length(&self, doc: u32) -> Option<u32> {
        self.doc_lengths.get(doc as usize).copied()
    }

    pub fn doc(&self, doc: u32) -> Option<&DocMeta> {
        self.docs.get(doc as usize)
    }

    pub fn docs(&self) -> &[DocMeta] {
        &self.docs
    }

    /// Postings list for `term`, sorted by document number.
    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.postings.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    /// Number of documents containing `term`.
    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings(term).len()
    }

    pub fn idf(&self, term: &str) -> f64 {
        idf_for(self.doc_count(), self.doc_freq(term))
    }

    fn term_weight(&self, idf: f64, tf: u32, doc_len: u32) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let tf = f64::from(tf);
        let norm = 1.0 - b + b * f64::from(doc_len) / self.avg_doc_length;
        idf * tf * (k1 + 1.0) / (tf + k1 * norm)
    }

    /// BM25 score of one document for already-analyzed query terms.
    pub fn bm25_score<S: AsRef<str>>(&self, query_terms: &[S], doc: u32) -> Result<f64> {
        let doc_len = self.doc_length(doc).ok_or(Error::UnknownDocument(doc))?;
        let distinct: BTreeSet<&str> = query_terms.iter().map(AsRef::as_ref).collect();
        let mut score = 0.0;
        for term in distinct {
            let list = self.postings(term);
            if let Ok(i) = list.binary_search_by_key(&doc, |p| p.doc) {
                score += self.term_weight(self.idf(term), list[i].tf, doc_len);
            }
        }
        Ok(score)
    }

    /// Top `n` positive-score matches for free text, skipping `exclusions`
    /// (pair ids).
    pub fn query_top_n(
        &self,
        query_text: &str,
        n: usize,
        exclusions: &HashSet<String>,
    ) -> Vec<FuzzyMatch> {
        let terms = analyze_for_index(query_text);
        self.query_terms_top_n(&terms, n, exclusions)
    }

    pub fn query_terms_top_n<S: AsRef<str>>(
        &self,
        query_terms: &[S],
        n: usize,
        exclusions: &HashSet<String>,
    ) -> Vec<FuzzyMatch> {
        if n == 0 {
            return Vec::new();
        }
        let distinct: BTreeSet<&str> = query_terms.iter().map(AsRef::as_ref).collect();
        // Term-at-a-time accumulation in sorted term order, which is the
        // same summation order bm25_score uses.
        let mut acc: HashMap<u32, f64> = HashMap::new();
        for term in distinct {
            let list = self.postings(term);
            if list.is_empty() {
                continue;
            }
            let idf = self.idf(term);
            for p in list {
                let w = self.term_weight(idf, p.tf, self.doc_lengths[p.doc as usize]);
                *acc.entry(p.doc).or_insert(0.0) += w;
            }
        }
        let mut hits: Vec<(u32, f64)> = acc
            .into_iter()
            .filter(|&(doc, score)| {
                score > 0.0 && !exclusions.contains(&self.docs[doc as usize].pair_id)
            })
            .collect();
        let by_rank = |a: &(u32, f64), b: &(u32, f64)| -> Ordering {
            b.1.total_cmp(&a.1).then_with(|| {
                self.docs[a.0 as usize]
                    .pair_id
                    .cmp(&self.docs[b.0 as usize].pair_id)
            })
        };
        if hits.len() > n {
            hits.select_nth_unstable_by(n - 1, by_rank);
            hits.truncate(n);
        }
        hits.sort_unstable_by(by_rank);
        hits.into_iter()
            .enumerate()
            .map(|(i, (doc, score))| {
                let meta = &self.docs[doc as usize];
                FuzzyMatch {
                    pair_id: meta.pair_id.clone(),
                    score,
                    rank: i + 1,
                    source: meta.source.clone(),
                    target: meta.target.clone(),
                    domain: meta.domain.clone(),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> TmIndex {
        let tm = TranslationMemory::new(
            "tiny",
            vec![
                SentencePair::new("d1", "x", "the cat sat", "t1"),
                SentencePair::new("d2", "x", "the dog", "t2"),
                SentencePair::new("d3", "x", "cat", "t3"),
            ],
        )
        .unwrap();
        TmIndex::build(&tm, Bm25Params::default()).unwrap()
    }

    #[test]
    fn tiny_statistics() {
        let idx = tiny();
        assert_eq!(idx.doc_count(), 3);
        assert_eq!(idx.avg_doc_length(), 2.0);
        assert_eq!(
            idx.postings("cat"),
            [Posting { doc: 0, tf: 1 }, Posting { doc: 2, tf: 1 }]
        );
        assert_eq!(idx.docs()[0].pair_id, "d1");
    }

    #[test]
    fn idf_values() {
        assert!((idf_for(3, 2) - 1.6f64.ln()).abs() < 1e-15);
        assert!((idf_for(3, 2) - 0.4700).abs() < 5e-5);
        assert!((idf_for(3, 0) - 8f64.ln()).abs() < 1e-15);
        assert!((idf_for(3, 0) - 2.0794).abs() < 5e-5);
        assert!((idf_for(1, 1) - (4.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((idf_for(1, 1) - 0.2877).abs() < 5e-5);
    }

    #[test]
    fn scores_on_tiny_index() {
        let idx = tiny();
        let idf = 1.6f64.ln();
        // d1: dl=3, avgdl=2 -> norm 1 - 0.75 + 0.75*1.5 = 1.375; denom 1 + 1.2*1.375 = 2.65
        let d1 = idx.bm25_score(&["cat"], 0).unwrap();
        assert!((d1 - idf * 2.2 / 2.65).abs() < 1e-12);
        assert!((d1 - 0.390).abs() < 5e-4);
        // d3: dl=1 -> norm 0.625; denom 1.75
        let d3 = idx.bm25_score(&["cat"], 2).unwrap();
        assert!((d3 - idf * 2.2 / 1.75).abs() < 1e-12);
        assert!((d3 - 0.591).abs() < 5e-4);
        assert_eq!(idx.bm25_score(&["zebra"], 0).unwrap(), 0.0);
        assert!(matches!(idx.bm25_score(&["cat"], 7), Err(Error::UnknownDocument(7))));
    }

    #[test]
    fn duplicate_query_terms_count_once() {
        let idx = tiny();
        assert_eq!(
            idx.bm25_score(&["cat", "cat", "cat"], 0).unwrap(),
            idx.bm25_score(&["cat"], 0).unwrap()
        );
    }

    #[test]
    fn top_n_ordering_and_exclusion() {
        let idx = tiny();
        let none = HashSet::new();
        let hits = idx.query_top_n("cat", 2, &none);
        let ids: Vec<_> = hits.iter().map(|m| m.pair_id.as_str()).collect();
        assert_eq!(ids, ["d3", "d1"]);
        assert_eq!(hits[0].rank, 1);
        assert_eq!(hits[1].rank, 2);
        assert_eq!(hits[0].target, "t3");

        assert!(idx.query_top_n("zebra", 5, &none).is_empty());

        let excl: HashSet<String> = ["d1".to_string()].into();
        let hits = idx.query_top_n("the cat sat", 5, &excl);
        assert!(hits.iter().all(|m| m.pair_id != "d1"));
        assert!(!hits.is_empty());
    }

    #[test]
    fn ties_break_by_pair_id() {
        let tm = TranslationMemory::new(
            "t",
            vec![
                SentencePair::new("b", "x", "apple pie", "1"),
                SentencePair::new("a", "x", "apple tart", "2"),
                SentencePair::new("c", "x", "apple cake", "3"),
            ],
        )
        .unwrap();
        let idx = TmIndex::build(&tm, Bm25Params::default()).unwrap();
        let ids: Vec<_> = idx
            .query_top_n("apple", 2, &HashSet::new())
            .into_iter()
            .map(|m| m.pair_id)
            .collect();
        assert_eq!(ids, ["a", "b"]);
    }

    #[test]
    fn rejects_unindexable_source() {
        let tm = TranslationMemory::new(
            "t",
            vec![
                SentencePair::new("ok", "x", "fine", "1"),
                SentencePair::new("bad", "x", "?!", "2"),
            ],
        )
        .unwrap();
        let err = TmIndex::build(&tm, Bm25Params::default()).unwrap_err();
        assert!(err.to_string().contains("\"bad\""));
    }

    #[test]
    fn params_validated() {
        assert!(Bm25Params::new(-0.1, 0.5).is_err());
        assert!(Bm25Params::new(1.0, 1.5).is_err());
        assert!(Bm25Params::new(f64::NAN, 0.5).is_err());
        assert!(Bm25Params::new(0.0, 0.0).is_ok());
    }
}
