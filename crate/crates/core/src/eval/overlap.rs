use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::augment::AugmentedExample;
use crate::corpus::tokenize_13a;
use crate::{Error, Result};

/// How suggestion tokens are credited against the output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapCounting {
    /// Every suggestion token instance whose type occurs anywhere in the
    /// output counts.
    #[default]
    TypeMembership,
    /// Suggestion counts are clipped by the output counts per type.
    Clipped,
}

/// How per-sentence values become one corpus number.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapAveraging {
    #[default]
    PerSentence,
    /// Sum numerators and denominators over the corpus.
    Pooled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapResult {
    /// Fraction in `[0, 1]`, or `None` when the example had no suggestion
    /// tokens.
    pub per_sentence: Vec<Option<f64>>,
    /// Corpus percentage; `None` when no sentence had suggestion tokens.
    pub mean_percent: Option<f64>,
}

/// Share of suggestion tokens that reappear in the system output, as a
/// percentage averaged over sentences.
pub fn suggestion_overlap<S: AsRef<str>>(
    examples: &[AugmentedExample],
    outputs: &[S],
) -> Result<OverlapResult> {
    suggestion_overlap_with(
        examples,
        outputs,
        OverlapCounting::default(),
        OverlapAveraging::default(),
    )
}

pub fn suggestion_overlap_with<S: AsRef<str>>(
    examples: &[AugmentedExample],
    outputs: &[S],
    counting: OverlapCounting,
    averaging: OverlapAveraging,
) -> Result<OverlapResult> {
    if examples.len() != outputs.len() {
        return Err(Error::Contract(format!(
            "{} examples but {} outputs",
            examples.len(),
            outputs.len()
        )));
    }
    let mut per_sentence = Vec::with_capacity(examples.len());
    let (mut hit_sum, mut tok_sum) = (0u64, 0u64);
    for (ex, out) in examples.iter().zip(outputs) {
        let joined = ex
            .suggestions
            .iter()
            .map(|s| s.target.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        let sugg = tokenize_13a(&joined);
        if sugg.is_empty() {
            per_sentence.push(None);
            continue;
        }
        let out_toks = tokenize_13a(out.as_ref());
        let hits = match counting {
            OverlapCounting::TypeMembership => {
                let types: HashSet<&str> = out_toks.iter().map(String::as_str).collect();
                sugg.iter().filter(|t| types.contains(t.as_str())).count() as u64
            }
            OverlapCounting::Clipped => {
                let mut avail: HashMap<&str, u64> = HashMap::new();
                for t in &out_toks {
                    *avail.entry(t).or_insert(0) += 1;
                }
                let mut hits = 0;
                for t in &sugg {
                    if let Some(c) = avail.get_mut(t.as_str()).filter(|c| **c > 0) {
                        *c -= 1;
                        hits += 1;
                    }
                }
                hits
            }
        };
        hit_sum += hits;
        tok_sum += sugg.len() as u64;
        per_sentence.push(Some(hits as f64 / sugg.len() as f64));
    }
    let mean_percent = match averaging {
        OverlapAveraging::PerSentence => {
            let vals: Vec<f64> = per_sentence.iter().flatten().copied().collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64 * 100.0)
        }
        OverlapAveraging::Pooled => {
            (tok_sum > 0).then(|| hit_sum as f64 / tok_sum as f64 * 100.0)
        }
    };
    Ok(OverlapResult {
        per_sentence,
        mean_percent,
    })
}
