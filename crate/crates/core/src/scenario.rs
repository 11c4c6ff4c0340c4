//! Relevant and less-relevant TM settings for a test domain.
//!
//! `Relevant` indexes only pairs from the test domain. `LessRelevant` builds
//! one merged index over every pair whose domain differs from the test
//! domain, so BM25 statistics are global across the eligible memories.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::augment::AugmentedExample;
use crate::bm25::{Bm25Params, TmIndex};
use crate::corpus::{SentencePair, TranslationMemory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relevance {
    Relevant,
    #[serde(alias = "less-relevant")]
    LessRelevant,
}

impl Relevance {
    pub fn as_str(self) -> &'static str {
        match self {
            Relevance::Relevant => "relevant",
            Relevance::LessRelevant => "less_relevant",
        }
    }
}

impl std::fmt::Display for Relevance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Relevance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relevant" => Ok(Relevance::Relevant),
            "less-relevant" | "less_relevant" => Ok(Relevance::LessRelevant),
            other => Err(Error::Config(format!("unknown relevance {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub test_domain: String,
    pub relevance: Relevance,
    pub tm_sources: Vec<String>,
    pub resolved_domains: BTreeSet<String>,
}

impl ScenarioSpec {
    /// Whether a suggestion from `domain` is allowed under this scenario.
    pub fn admits(&self, domain: &str) -> bool {
        match self.relevance {
            Relevance::Relevant => domain == self.test_domain,
            Relevance::LessRelevant => domain != self.test_domain,
        }
    }
}

/// Select the eligible pairs of `tms` and index them as one memory.
pub fn build_scenario(
    test_domain: &str,
    tms: &[TranslationMemory],
    relevance: Relevance,
    params: Bm25Params,
) -> Result<(ScenarioSpec, TmIndex)> {
    let all_domains: BTreeSet<&str> = tms
        .iter()
        .flat_map(|tm| tm.domains().iter().map(String::as_str))
        .collect();
    match relevance {
        Relevance::Relevant if !all_domains.contains(test_domain) => {
            return Err(Error::Config(format!(
                "no translation memory contains domain {test_domain:?}"
            )));
        }
        Relevance::LessRelevant if all_domains.iter().all(|d| *d == test_domain) => {
            return Err(Error::Config(format!(
                "no domain other than {test_domain:?} is available"
            )));
        }
        _ => {}
    }

    let keep = |p: &SentencePair| match relevance {
        Relevance::Relevant => p.domain == test_domain,
        Relevance::LessRelevant => p.domain != test_domain,
    };
    let mut tm_sources = Vec::new();
    let mut resolved = BTreeSet::new();
    let mut selected: Vec<&SentencePair> = Vec::new();
    for tm in tms {
        let before = selected.len();
        selected.extend(tm.pairs().iter().filter(|p| keep(p)));
        if selected.len() > before {
            tm_sources.push(tm.name().to_string());
        }
    }
    let mut seen = std::collections::HashSet::with_capacity(selected.len());
    for p in &selected {
        if !seen.insert(p.id.as_str()) {
            return Err(Error::Validation(format!(
                "pair id {:?} occurs in more than one memory",
                p.id
            )));
        }
        resolved.insert(p.domain.clone());
    }
    let index = TmIndex::from_pairs(selected, params)?;
    let spec = ScenarioSpec {
        test_domain: test_domain.to_string(),
        relevance,
        tm_sources,
        resolved_domains: resolved,
    };
    Ok((spec, index))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub example_id: String,
    pub pair_id: String,
    pub domain: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub passed: bool,
    pub examples: usize,
    pub suggestions_by_domain: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
}

/// Count suggestion origins; any suggestion from an excluded domain is a
/// violation.
pub fn validate_scenario(spec: &ScenarioSpec, examples: &[AugmentedExample]) -> ScenarioReport {
    let mut by_domain = BTreeMap::new();
    let mut violations = Vec::new();
    for ex in examples {
        for s in &ex.suggestions {
            *by_domain.entry(s.domain.clone()).or_insert(0) += 1;
            if !spec.admits(&s.domain) {
                violations.push(Violation {
                    example_id: ex.pair_id.clone(),
                    pair_id: s.pair_id.clone(),
                    domain: s.domain.clone(),
                });
            }
        }
    }
    ScenarioReport {
        passed: violations.is_empty(),
        examples: examples.len(),
        suggestions_by_domain: by_domain,
        violations,
    }
}
