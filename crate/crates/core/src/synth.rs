//! Synthetic multi-domain corpora for exercising the pipeline without real
//! data.
//!
//! Every domain owns disjoint source and target vocabularies. A domain is a
//! set of topics; each topic has one reference translation, several TM
//! pairs whose targets differ from the reference in a single token, and a
//! few test sentences whose targets are the reference itself. All sources
//! also carry words from a small vocabulary shared by every domain, so
//! retrieval from other domains still finds (useless) matches.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{write_corpus, CorpusFormat, SentencePair, TranslationMemory};
use crate::seed::keyed_rng;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub domains: Vec<String>,
    pub topics_per_domain: usize,
    pub tm_pairs_per_topic: usize,
    pub tests_per_topic: usize,
    pub source_len: usize,
    pub target_len: usize,
    pub shared_vocab: usize,
    pub shared_per_sentence: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            domains: vec!["it".into(), "law".into()],
            topics_per_domain: 20,
            tm_pairs_per_topic: 4,
            tests_per_topic: 2,
            source_len: 6,
            target_len: 12,
            shared_vocab: 20,
            shared_per_sentence: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    /// One TM per domain, in `domains` order.
    pub tms: Vec<TranslationMemory>,
    /// Test set per domain.
    pub tests: BTreeMap<String, TranslationMemory>,
}

// Lowercase letters only, so both tokenizers keep words intact.
fn word(prefix: &str, n: usize) -> String {
    let mut s = String::from(prefix);
    let mut n = n;
    loop {
        s.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    s
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    if cfg.domains.is_empty()
        || cfg.topics_per_domain == 0
        || cfg.tm_pairs_per_topic == 0
        || cfg.source_len < 2
        || cfg.target_len < 2
        || cfg.shared_vocab == 0
    {
        return Err(Error::Config("degenerate synthetic corpus settings".into()));
    }
    let shared: Vec<String> = (0..cfg.shared_vocab).map(|i| word("com", i)).collect();
    let mut tms = Vec::new();
    let mut tests = BTreeMap::new();
    for (di, domain) in cfg.domains.iter().enumerate() {
        let mut rng = keyed_rng(cfg.seed, domain.as_bytes());
        let sp = format!("{}s", word("d", di));
        let tp = format!("{}t", word("d", di));
        let mut tm_pairs = Vec::new();
        let mut test_pairs = Vec::new();
        for t in 0..cfg.topics_per_domain {
            let src_words: Vec<String> = (0..cfg.source_len)
                .map(|j| word(&sp, t * cfg.source_len + j))
                .collect();
            let reference: Vec<String> = (0..cfg.target_len)
                .map(|j| word(&tp, t * cfg.target_len + j))
                .collect();
            let source_for = |drop: usize, rng: &mut rand_chacha::ChaCha8Rng| {
                let mut words: Vec<&str> = src_words
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != drop % cfg.source_len)
                    .map(|(_, w)| w.as_str())
                    .collect();
                for _ in 0..cfg.shared_per_sentence {
                    let w = shared.choose(rng).expect("shared vocab is non-empty");
                    let at = rng.random_range(0..=words.len());
                    words.insert(at, w);
                }
                words.join(" ")
            };
            for p in 0..cfg.tm_pairs_per_topic {
                let source = source_for(p, &mut rng);
                // one edge token differs from the reference
                let mut target = reference.clone();
                let last = target.len() - 1;
                let at = if p % 2 == 0 { last } else { 0 };
                target[at] = word(&format!("{tp}v"), t * cfg.tm_pairs_per_topic + p);
                tm_pairs.push(SentencePair::new(
                    format!("{domain}-{t}-{p}"),
                    domain.clone(),
                    source,
                    target.join(" "),
                ));
            }
            for q in 0..cfg.tests_per_topic {
                let source = source_for(q + cfg.tm_pairs_per_topic, &mut rng);
                test_pairs.push(SentencePair::new(
                    format!("test-{domain}-{t}-{q}"),
                    domain.clone(),
                    source,
                    reference.join(" "),
                ));
            }
        }
        tms.push(TranslationMemory::new(domain.clone(), tm_pairs)?);
        if !test_pairs.is_empty() {
            tests.insert(
                domain.clone(),
                TranslationMemory::new(format!("test_{domain}"), test_pairs)?,
            );
        }
    }
    Ok(SynthCorpus { tms, tests })
}

impl SynthCorpus {
    /// Write `tm_<domain>.jsonl` and `test_<domain>.jsonl` into `dir`.
    /// Returns (TM paths, test path per domain).
    pub fn write_to_dir(&self, dir: &Path) -> Result<(Vec<PathBuf>, BTreeMap<String, PathBuf>)> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        let write = |name: String, tm: &TranslationMemory| -> Result<PathBuf> {
            let path = dir.join(name);
            let f = std::fs::File::create(&path)
                .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
            write_corpus(f, tm.pairs(), CorpusFormat::Jsonl)?;
            Ok(path)
        };
        let tms = self
            .tms
            .iter()
            .map(|tm| write(format!("tm_{}.jsonl", tm.name()), tm))
            .collect::<Result<_>>()?;
        let tests = self
            .tests
            .iter()
            .map(|(d, tm)| Ok((d.clone(), write(format!("test_{d}.jsonl"), tm)?)))
            .collect::<Result<_>>()?;
        Ok((tms, tests))
    }
}
