use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::bleu::BleuScore;
use super::bootstrap::SignificanceResult;
use crate::scenario::Relevance;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub system: String,
    pub scenario: Relevance,
    pub domain: String,
    pub k: usize,
}

impl std::fmt::Display for CellKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}/{}/k={}", self.system, self.scenario, self.domain, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    #[serde(flatten)]
    pub key: CellKey,
    pub bleu: BleuScore,
    /// Suggestion overlap percentage, absent when no suggestions were made.
    pub overlap: Option<f64>,
}

/// Means for one (system, scenario) over its domain × k grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageEntry {
    pub system: String,
    pub scenario: Relevance,
    pub mean_bleu: f64,
    pub cells: usize,
    pub by_k: BTreeMap<usize, f64>,
    pub by_domain: BTreeMap<String, f64>,
    pub mean_overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceEntry {
    pub a: CellKey,
    pub b: CellKey,
    pub result: SignificanceResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub cells: Vec<CellResult>,
    pub averages: Vec<AverageEntry>,
    pub significance: Vec<SignificanceEntry>,
}

fn mean(vals: &[f64]) -> f64 {
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// Aggregate per-cell results into per-(system, scenario) means.
///
/// Each (system, scenario) group must cover the full cross product of the
/// domains and k values it mentions.
pub fn aggregate_report(
    mut cells: Vec<CellResult>,
    mut significance: Vec<SignificanceEntry>,
) -> Result<EvalReport> {
    cells.sort_by(|a, b| a.key.cmp(&b.key));
    if let Some(w) = cells.windows(2).find(|w| w[0].key == w[1].key) {
        return Err(Error::Aggregation(format!("duplicate cell {}", w[0].key)));
    }

    let mut groups: BTreeMap<(String, Relevance), Vec<&CellResult>> = BTreeMap::new();
    for c in &cells {
        groups
            .entry((c.key.system.clone(), c.key.scenario))
            .or_default()
            .push(c);
    }

    let mut averages = Vec::with_capacity(groups.len());
    for ((system, scenario), group) in groups {
        let domains: BTreeSet<&str> = group.iter().map(|c| c.key.domain.as_str()).collect();
        let ks: BTreeSet<usize> = group.iter().map(|c| c.key.k).collect();
        let present: BTreeSet<(&str, usize)> = group
            .iter()
            .map(|c| (c.key.domain.as_str(), c.key.k))
            .collect();
        for d in &domains {
            for k in &ks {
                if !present.contains(&(d, *k)) {
                    return Err(Error::Aggregation(format!(
                        "missing cell {system}/{scenario}/{d}/k={k}"
                    )));
                }
            }
        }
        let all: Vec<f64> = group.iter().map(|c| c.bleu.score).collect();
        let by_k = ks
            .iter()
            .map(|&k| {
                let v: Vec<f64> = group
                    .iter()
                    .filter(|c| c.key.k == k)
                    .map(|c| c.bleu.score)
                    .collect();
                (k, mean(&v))
            })
            .collect();
        let by_domain = domains
            .iter()
            .map(|&d| {
                let v: Vec<f64> = group
                    .iter()
                    .filter(|c| c.key.domain == d)
                    .map(|c| c.bleu.score)
                    .collect();
                (d.to_string(), mean(&v))
            })
            .collect();
        let overlaps: Vec<f64> = group.iter().filter_map(|c| c.overlap).collect();
        averages.push(AverageEntry {
            system,
            scenario,
            mean_bleu: mean(&all),
            cells: group.len(),
            by_k,
            by_domain,
            mean_overlap: (!overlaps.is_empty()).then(|| mean(&overlaps)),
        });
    }
    significance.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    Ok(EvalReport {
        cells,
        averages,
        significance,
    })
}

impl EvalReport {
    pub fn cell(&self, key: &CellKey) -> Option<&CellResult> {
        self.cells
            .binary_search_by(|c| c.key.cmp(key))
            .ok()
            .map(|i| &self.cells[i])
    }

    pub fn average(&self, system: &str, scenario: Relevance) -> Option<&AverageEntry> {
        self.averages
            .iter()
            .find(|a| a.system == system && a.scenario == scenario)
    }

    /// Markdown tables: overall means, BLEU per domain and k, and
    /// suggestion overlap per domain and k.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let scenarios: BTreeSet<Relevance> = self.averages.iter().map(|a| a.scenario).collect();
        let systems: BTreeSet<&str> = self.averages.iter().map(|a| a.system.as_str()).collect();

        out.push_str("## Average BLEU across domains and k\n\n| system |");
        for s in &scenarios {
            let _ = write!(out, " {s} |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(scenarios.len()));
        out.push('\n');
        for sys in &systems {
            let _ = write!(out, "| {sys} |");
            for s in &scenarios {
                match self.average(sys, *s) {
                    Some(a) => {
                        let _ = write!(out, " {:.2} |", a.mean_bleu);
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }

        let metrics: [(&str, fn(&CellResult) -> Option<f64>); 2] = [
            ("BLEU", |c| Some(c.bleu.score)),
            ("Suggestion overlap (%)", |c| c.overlap),
        ];
        for (title, value) in metrics {
            for a in &self.averages {
                let _ = write!(out, "\n## {title}: {} / {}\n\n| domain |", a.system, a.scenario);
                for k in a.by_k.keys() {
                    let _ = write!(out, " k={k} |");
                }
                out.push_str("\n|---|");
                out.push_str(&"---:|".repeat(a.by_k.len()));
                out.push('\n');
                for d in a.by_domain.keys() {
                    let _ = write!(out, "| {d} |");
                    for &k in a.by_k.keys() {
                        let key = CellKey {
                            system: a.system.clone(),
                            scenario: a.scenario,
                            domain: d.clone(),
                            k,
                        };
                        match self.cell(&key).and_then(value) {
                            Some(v) => {
                                let star = self
                                    .significance
                                    .iter()
                                    .any(|s| (s.a == key || s.b == key) && s.result.significant);
                                let _ = write!(out, " {v:.2}{} |", if star { "*" } else { "" });
                            }
                            None => out.push_str(" - |"),
                        }
                    }
                    out.push('\n');
                }
            }
        }
        if !self.significance.is_empty() {
            out.push_str("\n## Paired bootstrap\n\n| A | B | delta | p | significant |\n|---|---|---:|---:|:---:|\n");
            for s in &self.significance {
                let _ = writeln!(
                    out,
                    "| {} | {} | {:.2} | {:.3} | {} |",
                    s.a,
                    s.b,
                    s.result.observed_delta,
                    s.result.p_value,
                    if s.result.significant { "yes" } else { "no" }
                );
            }
        }
        out
    }
}
