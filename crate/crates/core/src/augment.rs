//! Suggestion augmentation.
//!
//! At inference the top-k fuzzy matches are appended to the source. For
//! training, k suggestions are drawn uniformly without replacement from the
//! top `pool_size` matches so the model also sees lower-ranked, noisier
//! suggestions.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bm25::{FuzzyMatch, TmIndex};
use crate::corpus::{SentencePair, TranslationMemory};
use crate::seed::keyed_rng;
use crate::{Error, Result};

pub const DEFAULT_SEPARATOR: &str = "@@SEP@@";
pub const DEFAULT_POOL_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    Topk,
    Shuffle,
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "topk" => Ok(SamplingMode::Topk),
            "shuffle" => Ok(SamplingMode::Shuffle),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentationConfig {
    pub k: usize,
    #[serde(alias = "pool")]
    pub pool_size: usize,
    pub mode: SamplingMode,
    pub seed: u64,
    pub exclude_self: bool,
    pub separator: String,
    /// Emit shuffle-mode samples in draw order instead of rank order.
    pub keep_sampled_order: bool,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            k: 3,
            pool_size: DEFAULT_POOL_SIZE,
            mode: SamplingMode::Topk,
            seed: 0,
            exclude_self: true,
            separator: DEFAULT_SEPARATOR.to_string(),
            keep_sampled_order: false,
        }
    }
}

impl AugmentationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.pool_size {
            return Err(Error::Config(format!(
                "need 1 <= k <= pool_size, got k={} pool_size={}",
                self.k, self.pool_size
            )));
        }
        if self.separator.is_empty() || self.separator.chars().any(char::is_whitespace) {
            return Err(Error::Config(format!(
                "separator {:?} must be non-empty and contain no whitespace",
                self.separator
            )));
        }
        Ok(())
    }

    fn retrieval_depth(&self) -> usize {
        match self.mode {
            SamplingMode::Topk => self.k,
            SamplingMode::Shuffle => self.pool_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedExample {
    pub pair_id: String,
    pub source: String,
    pub reference: String,
    pub suggestions: Vec<FuzzyMatch>,
    pub flat_input: String,
}

/// `source SEP t1 SEP t2 ...`, single-space joined.
pub fn flatten(source: &str, suggestions: &[FuzzyMatch], separator: &str) -> String {
    let mut out = String::from(source);
    for s in suggestions {
        out.push(' ');
        out.push_str(separator);
        out.push(' ');
        out.push_str(&s.target);
    }
    out
}

pub fn take_top_k(matches: &[FuzzyMatch], k: usize) -> Vec<FuzzyMatch> {
    matches.iter().take(k).cloned().collect()
}

/// Draw `min(k, pool)` distinct items uniformly from the first `pool_size`
/// matches; returned in ascending rank order.
pub fn sample_suggestions<R: Rng + ?Sized>(
    matches: &[FuzzyMatch],
    k: usize,
    pool_size: usize,
    rng: &mut R,
) -> Vec<FuzzyMatch> {
    let mut picks = sample_pool_indices(matches.len(), k, pool_size, rng);
    picks.sort_unstable();
    picks.into_iter().map(|i| matches[i].clone()).collect()
}

/// Indices into the pool in draw order.
pub fn sample_pool_indices<R: Rng + ?Sized>(
    available: usize,
    k: usize,
    pool_size: usize,
    rng: &mut R,
) -> Vec<usize> {
    let pool = pool_size.min(available);
    let amount = k.min(pool);
    rand::seq::index::sample(rng, pool, amount).into_vec()
}

/// The separator may not occur in any text that ends up in a flat input.
fn check_separator(tm: &TranslationMemory, index: &TmIndex, sep: &str) -> Result<()> {
    let clash = tm
        .pairs()
        .iter()
        .flat_map(|p| [(&p.id, &p.source), (&p.id, &p.target)])
        .chain(
            index
                .docs()
                .iter()
                .flat_map(|d| [(&d.pair_id, &d.source), (&d.pair_id, &d.target)]),
        )
        .find(|(_, text)| text.contains(sep));
    match clash {
        Some((id, _)) => Err(Error::Validation(format!(
            "separator {sep:?} occurs in pair {id:?}"
        ))),
        None => Ok(()),
    }
}

struct Augmenter<'a> {
    index: &'a TmIndex,
    cfg: &'a AugmentationConfig,
    by_source: HashMap<&'a str, Vec<&'a str>>,
}

impl<'a> Augmenter<'a> {
    fn new(index: &'a TmIndex, cfg: &'a AugmentationConfig) -> Self {
        let mut by_source: HashMap<&str, Vec<&str>> = HashMap::new();
        if cfg.exclude_self {
            for d in index.docs() {
                by_source.entry(&d.source).or_default().push(&d.pair_id);
            }
        }
        Self {
            index,
            cfg,
            by_source,
        }
    }

    fn exclusions(&self, pair: &SentencePair) -> HashSet<String> {
        if !self.cfg.exclude_self {
            return HashSet::new();
        }
        let mut out: HashSet<String> = HashSet::new();
        out.insert(pair.id.clone());
        if let Some(ids) = self.by_source.get(pair.source.as_str()) {
            out.extend(ids.iter().map(|s| s.to_string()));
        }
        out
    }

    fn augment(&self, pair: &SentencePair) -> AugmentedExample {
        let cfg = self.cfg;
        let matches =
            self.index
                .query_top_n(&pair.source, cfg.retrieval_depth(), &self.exclusions(pair));
        let suggestions = match cfg.mode {
            SamplingMode::Topk => take_top_k(&matches, cfg.k),
            SamplingMode::Shuffle => {
                let mut rng = keyed_rng(cfg.seed, pair.id.as_bytes());
                if cfg.keep_sampled_order {
                    sample_pool_indices(matches.len(), cfg.k, cfg.pool_size, &mut rng)
                        .into_iter()
                        .map(|i| matches[i].clone())
                        .collect()
                } else {
                    sample_suggestions(&matches, cfg.k, cfg.pool_size, &mut rng)
                }
            }
        };
        AugmentedExample {
            pair_id: pair.id.clone(),
            source: pair.source.clone(),
            reference: pair.target.clone(),
            flat_input: flatten(&pair.source, &suggestions, &cfg.separator),
            suggestions,
        }
    }
}

/// One augmented example per pair of `tm`, in corpus order.
///
/// Each example draws from its own RNG keyed by `(seed, pair_id)`, so the
/// result does not depend on corpus order or on how the work is split across
/// threads.
pub fn augment_corpus(
    tm: &TranslationMemory,
    index: &TmIndex,
    cfg: &AugmentationConfig,
) -> Result<Vec<AugmentedExample>> {
    cfg.validate()?;
    check_separator(tm, index, &cfg.separator)?;
    let aug = Augmenter::new(index, cfg);
    Ok(tm.pairs().par_iter().map(|p| aug.augment(p)).collect())
}

#[derive(Serialize, Deserialize)]
struct SuggestionRecord {
    id: String,
    rank: usize,
    score: f64,
    tgt: String,
    #[serde(default)]
    domain: String,
    #[serde(default)]
    src: String,
}

#[derive(Serialize, Deserialize)]
struct AugmentedRecord {
    id: String,
    src: String,
    #[serde(rename = "ref", default)]
    reference: String,
    suggestions: Vec<SuggestionRecord>,
    flat: String,
}

impl From<&AugmentedExample> for AugmentedRecord {
    fn from(ex: &AugmentedExample) -> Self {
        Self {
            id: ex.pair_id.clone(),
            src: ex.source.clone(),
            reference: ex.reference.clone(),
            suggestions: ex
                .suggestions
                .iter()
                .map(|m| SuggestionRecord {
                    id: m.pair_id.clone(),
                    rank: m.rank,
                    score: m.score,
                    tgt: m.target.clone(),
                    domain: m.domain.clone(),
                    src: m.source.clone(),
                })
                .collect(),
            flat: ex.flat_input.clone(),
        }
    }
}

impl From<AugmentedRecord> for AugmentedExample {
    fn from(r: AugmentedRecord) -> Self {
        Self {
            pair_id: r.id,
            source: r.src,
            reference: r.reference,
            suggestions: r
                .suggestions
                .into_iter()
                .map(|s| FuzzyMatch {
                    pair_id: s.id,
                    score: s.score,
                    rank: s.rank,
                    source: s.src,
                    target: s.tgt,
                    domain: s.domain,
                })
                .collect(),
            flat_input: r.flat,
        }
    }
}

/// Write augmented examples as JSONL, one record per line.
pub fn write_augmented_jsonl<W: Write>(writer: W, examples: &[AugmentedExample]) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for ex in examples {
        serde_json::to_writer(&mut w, &AugmentedRecord::from(ex))?;
        w.write_all(b"\n")
            .map_err(|e| Error::io("writing augmented examples", e))?;
    }
    w.flush().map_err(|e| Error::io("writing augmented examples", e))
}

pub fn read_augmented_jsonl<R: BufRead>(reader: R, origin: &Path) -> Result<Vec<AugmentedExample>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: AugmentedRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            message: format!("malformed augmented record: {e}"),
        })?;
        out.push(rec.into());
    }
    Ok(out)
}

pub fn load_augmented(path: &Path) -> Result<Vec<AugmentedExample>> {
    let f = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    read_augmented_jsonl(std::io::BufReader::new(f), path)
}

/// Files written by [`write_augmented`].
#[derive(Debug, Clone)]
pub struct AugmentedFiles {
    pub jsonl: PathBuf,
    pub flat: PathBuf,
    pub reference: PathBuf,
}

impl AugmentedFiles {
    pub fn for_prefix(prefix: &Path) -> Self {
        let with = |ext: &str| {
            let mut s = prefix.as_os_str().to_owned();
            s.push(ext);
            PathBuf::from(s)
        };
        Self {
            jsonl: with(".jsonl"),
            flat: with(".flat.txt"),
            reference: with(".ref.txt"),
        }
    }
}

/// Write `PREFIX.jsonl`, `PREFIX.flat.txt` (one flat input per line) and
/// `PREFIX.ref.txt` (aligned references).
pub fn write_augmented(prefix: &Path, examples: &[AugmentedExample]) -> Result<AugmentedFiles> {
    let files = AugmentedFiles::for_prefix(prefix);
    let create = |p: &Path| {
        File::create(p).map_err(|e| Error::io(format!("creating {}", p.display()), e))
    };
    write_augmented_jsonl(create(&files.jsonl)?, examples)?;
    write_lines(&files.flat, examples.iter().map(|e| e.flat_input.as_str()))?;
    write_lines(&files.reference, examples.iter().map(|e| e.reference.as_str()))?;
    Ok(files)
}

/// Write one item per line. Embedded newlines would break alignment and are
/// rejected.
pub fn write_lines<'a>(path: &Path, lines: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    let mut w = BufWriter::new(f);
    let io_err = |e| Error::io(format!("writing {}", path.display()), e);
    for (i, line) in lines.into_iter().enumerate() {
        if line.contains(['\n', '\r']) {
            return Err(Error::Contract(format!(
                "line {} for {} contains a line break",
                i + 1,
                path.display()
            )));
        }
        w.write_all(line.as_bytes()).map_err(io_err)?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Read a line-aligned text file (trailing `\r` stripped).
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    Ok(split_lines(&text))
}

pub fn split_lines(text: &str) -> Vec<String> {
    text.lines().map(str::to_owned).collect()
}
