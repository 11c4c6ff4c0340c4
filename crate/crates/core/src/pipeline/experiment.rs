use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::Manifest;
use super::translator::translate_in;
use crate::augment::{augment_corpus, write_augmented, write_lines};
use crate::bm25::TmIndex;
use crate::corpus::{load_corpus, CorpusFormat, TranslationMemory};
use crate::eval::{
    aggregate_report, bleu_corpus, paired_bootstrap, suggestion_overlap, CellKey, CellResult,
    EvalReport, SignificanceEntry,
};
use crate::scenario::{build_scenario, validate_scenario, Relevance, ScenarioReport, ScenarioSpec};
use crate::{Error, Result};

pub const CELL_FILE: &str = "cell.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub key: CellKey,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCheck {
    pub key: CellKey,
    pub spec: ScenarioSpec,
    pub validation: ScenarioReport,
}

/// Everything `run` writes to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub report: EvalReport,
    pub failed_cells: Vec<CellFailure>,
    pub scenario_checks: Vec<ScenarioCheck>,
}

impl ExperimentReport {
    pub fn all_completed(&self) -> bool {
        self.failed_cells.is_empty()
    }
}

struct CellOutput {
    result: CellResult,
    check: ScenarioCheck,
    hyps: Vec<String>,
    refs: Vec<String>,
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn cell_dir(out: &Path, key: &CellKey) -> PathBuf {
    out.join("cells").join(format!(
        "{}__{}__{}__k{}",
        sanitize(&key.system),
        key.scenario,
        sanitize(&key.domain),
        key.k
    ))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn load_any(path: &Path) -> Result<TranslationMemory> {
    let format = CorpusFormat::from_path(path).ok_or_else(|| {
        Error::Config(format!("cannot tell corpus format of {}", path.display()))
    })?;
    load_corpus(path, format)
}

fn run_cell(
    manifest: &Manifest,
    key: &CellKey,
    scenario: &(ScenarioSpec, TmIndex),
    test: &TranslationMemory,
) -> Result<CellOutput> {
    let dir = cell_dir(&manifest.out_dir, key);
    std::fs::create_dir_all(&dir)
        .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let (spec, index) = scenario;
    let cfg = manifest.augmentation.for_k(key.k);
    let examples = augment_corpus(test, index, &cfg)?;
    write_augmented(&dir.join("augmented"), &examples)?;
    let validation = validate_scenario(spec, &examples);
    if !validation.passed {
        return Err(Error::Validation(format!(
            "{} suggestions from excluded domains",
            validation.violations.len()
        )));
    }

    let hyps = translate_in(&manifest.translator, &examples, &dir)?;
    if hyps.len() != examples.len() {
        return Err(Error::Contract(format!(
            "{} outputs for {} examples",
            hyps.len(),
            examples.len()
        )));
    }
    write_lines(&dir.join("hyp.txt"), hyps.iter().map(String::as_str))?;
    let refs: Vec<String> = examples.iter().map(|e| e.reference.clone()).collect();
    let bleu = bleu_corpus(&hyps, &refs)?;
    let overlap = suggestion_overlap(&examples, &hyps)?.mean_percent;
    let result = CellResult {
        key: key.clone(),
        bleu,
        overlap,
    };
    let check = ScenarioCheck {
        key: key.clone(),
        spec: spec.clone(),
        validation,
    };
    write_json(&dir.join(CELL_FILE), &result)?;
    write_json(&dir.join("scenario.json"), &check)?;
    Ok(CellOutput {
        result,
        check,
        hyps,
        refs,
    })
}

/// Run the manifest's full grid with up to `workers` threads.
///
/// Cells fail independently: an error in one cell is recorded in
/// `failed_cells` and the remaining cells still run. Averages are only
/// reported for (system, scenario) groups whose cells all completed.
/// Writes `report.json` and `report.md` to the output directory.
pub fn run_experiment(manifest: &Manifest, workers: usize) -> Result<ExperimentReport> {
    manifest.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    std::fs::create_dir_all(&manifest.out_dir)
        .map_err(|e| Error::io(format!("creating {}", manifest.out_dir.display()), e))?;
    pool.install(|| run_grid(manifest))
}

fn run_grid(manifest: &Manifest) -> Result<ExperimentReport> {
    let tms: Vec<TranslationMemory> = manifest
        .tms
        .iter()
        .map(|p| load_any(p))
        .collect::<Result<_>>()?;
    let system = manifest.system_name();

    let scenario_keys: Vec<(String, Relevance)> = manifest
        .domains
        .iter()
        .flat_map(|d| manifest.scenarios.iter().map(move |s| (d.clone(), *s)))
        .collect();
    let scenarios: HashMap<(String, Relevance), Result<(ScenarioSpec, TmIndex)>> = scenario_keys
        .par_iter()
        .map(|(d, s)| ((d.clone(), *s), build_scenario(d, &tms, *s, manifest.bm25)))
        .collect();
    let tests: HashMap<&String, Result<TranslationMemory>> = manifest
        .domains
        .par_iter()
        .map(|d| {
            let t = match manifest.test_sets.get(d) {
                Some(p) => load_any(p),
                None => Err(Error::Config(format!("no test set for domain {d:?}"))),
            };
            (d, t)
        })
        .collect();

    let mut keys = Vec::new();
    for d in &manifest.domains {
        for &k in &manifest.k_values {
            for &s in &manifest.scenarios {
                keys.push(CellKey {
                    system: system.clone(),
                    scenario: s,
                    domain: d.clone(),
                    k,
                });
            }
        }
    }
    let outcomes: Vec<(CellKey, Result<CellOutput>)> = keys
        .par_iter()
        .map(|key| {
            let sc = scenarios[&(key.domain.clone(), key.scenario)].as_ref();
            let test = tests[&key.domain].as_ref();
            let out = match (sc, test) {
                (Ok(sc), Ok(test)) => run_cell(manifest, key, sc, test),
                (Err(e), _) | (_, Err(e)) => Err(Error::Config(e.to_string())),
            };
            (key.clone(), out)
        })
        .collect();

    let mut done: BTreeMap<CellKey, CellOutput> = BTreeMap::new();
    let mut failed_cells = Vec::new();
    for (key, out) in outcomes {
        match out {
            Ok(o) => {
                done.insert(key, o);
            }
            Err(e) => failed_cells.push(CellFailure {
                key,
                error: e.to_string(),
            }),
        }
    }

    // relevant vs less-relevant on the same test set
    let mut pairs = Vec::new();
    for a in done.keys() {
        if a.scenario == Relevance::Relevant {
            let b = CellKey {
                scenario: Relevance::LessRelevant,
                ..a.clone()
            };
            if done.contains_key(&b) {
                pairs.push((a.clone(), b));
            }
        }
    }
    let bs = &manifest.bootstrap;
    let significance: Vec<SignificanceEntry> = pairs
        .into_par_iter()
        .map(|(a, b)| {
            let (ca, cb) = (&done[&a], &done[&b]);
            paired_bootstrap(&ca.hyps, &cb.hyps, &ca.refs, bs.n, bs.threshold, bs.seed)
                .map(|result| SignificanceEntry { a, b, result })
        })
        .collect::<Result<_>>()?;

    let incomplete: Vec<(String, Relevance)> = failed_cells
        .iter()
        .map(|f| (f.key.system.clone(), f.key.scenario))
        .collect();
    let (complete, partial): (Vec<CellResult>, Vec<CellResult>) = done
        .values()
        .map(|o| o.result.clone())
        .partition(|c| !incomplete.contains(&(c.key.system.clone(), c.key.scenario)));
    let mut report = aggregate_report(complete, significance)?;
    report.cells.extend(partial);
    report.cells.sort_by(|a, b| a.key.cmp(&b.key));

    let out = ExperimentReport {
        report,
        failed_cells,
        scenario_checks: done.into_values().map(|o| o.check).collect(),
    };
    write_json(&manifest.out_dir.join("report.json"), &out)?;
    std::fs::write(manifest.out_dir.join("report.md"), out.report.to_markdown())
        .map_err(|e| Error::io("writing report.md", e))?;
    Ok(out)
}

/// Collect every `cell.json` below `dir`, in path order.
pub fn load_cells(dir: &Path) -> Result<Vec<CellResult>> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = std::fs::read_dir(&d)
            .map_err(|e| Error::io(format!("listing {}", d.display()), e))?;
        for entry in entries {
            let path = entry
                .map_err(|e| Error::io(format!("listing {}", d.display()), e))?
                .path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n == CELL_FILE) {
                files.push(path);
            }
        }
    }
    files.sort();
    files
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::io(format!("reading {}", p.display()), e))?;
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: p.clone(),
                line: e.line(),
                message: e.to_string(),
            })
        })
        .collect()
}
