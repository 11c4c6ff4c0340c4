use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{is_split_space, tokenize_13a};
use crate::{Error, Result};

pub const MAX_ORDER: usize = 4;

/// Scorer configuration this implementation reproduces.
pub const SIGNATURE: &str = "nrefs:1|case:mixed|eff:no|tok:13a|smooth:exp";

/// Sufficient statistics for corpus BLEU. Sentence-level stats add up to the
/// corpus stats, which is what makes bootstrap resampling cheap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub correct: [u64; MAX_ORDER],
    pub total: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl std::ops::AddAssign<&BleuStats> for BleuStats {
    fn add_assign(&mut self, o: &BleuStats) {
        for n in 0..MAX_ORDER {
            self.correct[n] += o.correct[n];
            self.total[n] += o.total[n];
        }
        self.hyp_len += o.hyp_len;
        self.ref_len += o.ref_len;
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

fn prepare(text: &str) -> Vec<String> {
    tokenize_13a(text.trim_end_matches(is_split_space))
}

impl BleuStats {
    pub fn sentence(hypothesis: &str, reference: &str) -> Self {
        Self::from_tokens(&prepare(hypothesis), &prepare(reference))
    }

    pub fn from_tokens(hyp: &[String], reference: &[String]) -> Self {
        let mut s = BleuStats {
            hyp_len: hyp.len() as u64,
            ref_len: reference.len() as u64,
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            if hyp.len() < n {
                break;
            }
            s.total[n - 1] = (hyp.len() + 1 - n) as u64;
            let ref_counts = ngram_counts(reference, n);
            s.correct[n - 1] = ngram_counts(hyp, n)
                .into_iter()
                .map(|(g, c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
                .sum();
        }
        s
    }

    pub fn score(&self) -> BleuScore {
        let bp = if self.hyp_len < self.ref_len {
            if self.hyp_len > 0 {
                (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
            } else {
                0.0
            }
        } else {
            1.0
        };
        let mut precisions = [0.0; MAX_ORDER];
        let base = BleuScore {
            score: 0.0,
            precisions,
            brevity_penalty: bp,
            hyp_length: self.hyp_len,
            ref_length: self.ref_len,
        };
        if self.correct.iter().all(|&c| c == 0) {
            return base;
        }
        let mut smooth = 1.0;
        for n in 0..MAX_ORDER {
            if self.total[n] == 0 {
                break;
            }
            precisions[n] = if self.correct[n] == 0 {
                smooth *= 2.0;
                1.0 / (smooth * self.total[n] as f64)
            } else {
                self.correct[n] as f64 / self.total[n] as f64
            };
        }
        // Orders with no hypothesis n-grams keep precision 0 and zero the score.
        let log_sum: f64 = precisions
            .iter()
            .map(|&p| if p > 0.0 { p.ln() } else { -9_999_999_999.0 })
            .sum();
        BleuScore {
            score: 100.0 * bp * (log_sum / MAX_ORDER as f64).exp(),
            precisions,
            ..base
        }
    }
}

/// Corpus BLEU result. `precisions` are fractions in `[0, 1]`; `score` is on
/// the 0-100 scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    pub score: f64,
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_length: u64,
    pub ref_length: u64,
}

/// Corpus-level BLEU with 13a tokenization, mixed case, exponential
/// smoothing and no effective-order reduction.
pub fn bleu_corpus<H: AsRef<str>, R: AsRef<str>>(
    hypotheses: &[H],
    references: &[R],
) -> Result<BleuScore> {
    if hypotheses.len() != references.len() {
        return Err(Error::Contract(format!(
            "{} hypotheses but {} references",
            hypotheses.len(),
            references.len()
        )));
    }
    if hypotheses.is_empty() {
        return Err(Error::Contract("BLEU needs at least one sentence".into()));
    }
    let mut stats = BleuStats::default();
    for (h, r) in hypotheses.iter().zip(references) {
        stats += &BleuStats::sentence(h.as_ref(), r.as_ref());
    }
    Ok(stats.score())
}
