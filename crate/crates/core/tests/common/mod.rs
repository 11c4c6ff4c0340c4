#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rat_core::corpus::{analyze_for_index, SentencePair, TranslationMemory};
use rat_core::Bm25Params;

pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

/// Random TM with a skewed vocabulary so some terms are frequent and many
/// scores tie.
pub fn random_tm(n: usize, vocab: usize, seed: u64) -> TranslationMemory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domains = ["it", "law", "med"];
    let pairs = (0..n)
        .map(|i| {
            let len = rng.random_range(1..=12);
            let words: Vec<String> = (0..len)
                .map(|_| {
                    // squares bias toward low word ids
                    let r: f64 = rng.random();
                    format!("w{}", (r * r * vocab as f64) as usize)
                })
                .collect();
            SentencePair::new(
                format!("p{i:05}"),
                domains[i % domains.len()],
                words.join(" "),
                format!("target {i}"),
            )
        })
        .collect();
    TranslationMemory::new("random", pairs).unwrap()
}

pub fn random_queries(count: usize, vocab: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.random_range(1..=8);
            (0..len)
                .map(|_| format!("w{}", rng.random_range(0..vocab + 5)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// Straight-line BM25 over raw documents: every statistic is recomputed
/// from the analyzed text, nothing comes from the index.
pub struct BruteForce {
    pub docs: Vec<(String, Vec<String>)>,
    pub params: Bm25Params,
}

impl BruteForce {
    pub fn new(tm: &TranslationMemory, params: Bm25Params) -> Self {
        let docs = tm
            .pairs()
            .iter()
            .map(|p| (p.id.clone(), analyze_for_index(&p.source)))
            .collect();
        Self { docs, params }
    }

    pub fn avgdl(&self) -> f64 {
        let total: usize = self.docs.iter().map(|(_, t)| t.len()).sum();
        total as f64 / self.docs.len() as f64
    }

    pub fn df(&self, term: &str) -> usize {
        self.docs
            .iter()
            .filter(|(_, t)| t.iter().any(|x| x == term))
            .count()
    }

    pub fn idf(&self, term: &str) -> f64 {
        let n = self.docs.len() as f64;
        let df = self.df(term) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    pub fn score(&self, query: &[String], doc: usize) -> f64 {
        let (k1, b) = (self.params.k1, self.params.b);
        let avgdl = self.avgdl();
        let terms = &self.docs[doc].1;
        let dl = terms.len() as f64;
        let distinct: BTreeSet<&String> = query.iter().collect();
        let mut s = 0.0;
        for q in distinct {
            let tf = terms.iter().filter(|t| *t == q).count() as f64;
            if tf > 0.0 {
                s += self.idf(q) * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
            }
        }
        s
    }

    /// (pair id, score) for the top n positive scores, ties by ascending id.
    pub fn top_n(&self, query_text: &str, n: usize, excl: &HashSet<String>) -> Vec<(String, f64)> {
        let q = analyze_for_index(query_text);
        let mut all: Vec<(String, f64)> = (0..self.docs.len())
            .map(|d| (self.docs[d].0.clone(), self.score(&q, d)))
            .filter(|(id, s)| *s > 0.0 && !excl.contains(id))
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        all.truncate(n);
        all
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Two-domain synthetic corpus written to `dir`, plus an 8-cell manifest
/// (2 domains × k∈{1,2} × both scenarios) using `translator`.
#[allow(dead_code)]
pub fn synth_manifest(
    dir: &std::path::Path,
    translator: rat_core::pipeline::TranslatorSpec,
) -> rat_core::pipeline::Manifest {
    use rat_core::pipeline::{BootstrapConfig, Manifest, TestAugmentation};
    use rat_core::synth::{generate, SynthConfig};
    let corpus = generate(&SynthConfig::default()).unwrap();
    let (tms, test_sets) = corpus.write_to_dir(dir).unwrap();
    Manifest {
        tms,
        domains: test_sets.keys().cloned().collect(),
        test_sets,
        k_values: vec![1, 2],
        scenarios: vec![rat_core::Relevance::Relevant, rat_core::Relevance::LessRelevant],
        augmentation: TestAugmentation::default(),
        translator,
        bootstrap: BootstrapConfig {
            n: 200,
            ..BootstrapConfig::default()
        },
        out_dir: dir.join("results"),
        bm25: rat_core::Bm25Params::default(),
        system: None,
    }
}
