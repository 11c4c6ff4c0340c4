use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rat_core::augment::{self, AugmentationConfig, SamplingMode};
use rat_core::corpus::{load_corpus, CorpusFormat, TranslationMemory};
use rat_core::eval::{self, OverlapAveraging, OverlapCounting};
use rat_core::pipeline::{self, Manifest, TranslatorSpec};
use rat_core::scenario::{build_scenario, Relevance};
use rat_core::synth::{self, SynthConfig};
use rat_core::{Bm25Params, TmIndex};

#[derive(Parser)]
#[command(name = "rat", version, about = "Retrieval-augmented translation data and evaluation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone, Copy)]
struct Bm25Opts {
    /// BM25 term-frequency saturation
    #[arg(long, default_value_t = 1.2)]
    k1: f64,
    /// BM25 length normalization
    #[arg(long, default_value_t = 0.75)]
    b: f64,
}

impl Bm25Opts {
    fn params(self) -> Result<Bm25Params> {
        Ok(Bm25Params::new(self.k1, self.b)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Topk,
    Shuffle,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelevanceArg {
    Relevant,
    LessRelevant,
}

#[derive(Clone, Copy, ValueEnum)]
enum Counting {
    Type,
    Clipped,
}

#[derive(Clone, Copy, ValueEnum)]
enum Averaging {
    PerSentence,
    Pooled,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a BM25 index over the source side of a corpus.
    Index {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        format: Option<String>,
        #[command(flatten)]
        bm25: Bm25Opts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the top-n fuzzy matches for one sentence.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        text: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Comma-separated pair ids to skip
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<String>,
    },
    /// Append retrieved suggestions to every sentence of a corpus.
    Augment {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        format: Option<String>,
        #[arg(long, value_enum, default_value = "topk")]
        mode: Mode,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = augment::DEFAULT_POOL_SIZE)]
        pool: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = augment::DEFAULT_SEPARATOR)]
        separator: String,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        exclude_self: bool,
        /// Keep shuffle-mode samples in draw order instead of rank order
        #[arg(long)]
        keep_sampled_order: bool,
        /// Output prefix: writes PREFIX.jsonl, PREFIX.flat.txt, PREFIX.ref.txt
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the index for a relevant or less-relevant TM setting.
    Scenario {
        #[arg(long)]
        test_domain: String,
        #[arg(long, value_enum)]
        relevance: RelevanceArg,
        #[arg(long, value_delimiter = ',', required = true)]
        tms: Vec<PathBuf>,
        #[command(flatten)]
        bm25: Bm25Opts,
        /// Index file; the scenario description goes to OUT.scenario.json
        #[arg(long)]
        out: PathBuf,
    },
    /// Corpus BLEU (13a tokenization, exp smoothing).
    Bleu {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Percentage of suggestion tokens that appear in the outputs.
    Overlap {
        #[arg(long)]
        augmented: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long, value_enum, default_value = "type")]
        counting: Counting,
        #[arg(long, value_enum, default_value = "per-sentence")]
        averaging: Averaging,
    },
    /// Paired bootstrap significance test between two systems.
    Compare {
        #[arg(long)]
        hyp_a: PathBuf,
        #[arg(long)]
        hyp_b: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, default_value_t = eval::DEFAULT_BOOTSTRAP)]
        bootstrap: usize,
        #[arg(long, default_value_t = eval::DEFAULT_THRESHOLD)]
        p_thresh: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Aggregate cell.json files into a report (JSON plus a markdown sibling).
    Report {
        #[arg(long)]
        cells: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment manifest. Exits non-zero unless every cell completes.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Write a synthetic multi-domain corpus and a matching manifest.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "it,law")]
        domains: Vec<String>,
        #[arg(long, default_value_t = 20)]
        topics: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn corpus_format(path: &Path, explicit: Option<&str>) -> Result<CorpusFormat> {
    match explicit {
        Some(f) => Ok(f.parse()?),
        None => CorpusFormat::from_path(path)
            .with_context(|| format!("cannot infer format of {}; pass --format", path.display())),
    }
}

fn load(path: &Path, format: Option<&str>) -> Result<TranslationMemory> {
    Ok(load_corpus(path, corpus_format(path, format)?)?)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Cmd::Index {
            corpus,
            format,
            bm25,
            out,
        } => {
            let tm = load(&corpus, format.as_deref())?;
            let index = TmIndex::build(&tm, bm25.params()?)?;
            index.save(&out)?;
            eprintln!(
                "indexed {} pairs, {} terms, avgdl {:.3}",
                index.doc_count(),
                index.vocabulary_size(),
                index.avg_doc_length()
            );
        }
        Cmd::Query {
            index,
            text,
            n,
            exclude,
        } => {
            if n == 0 {
                bail!("--n must be at least 1");
            }
            let index = TmIndex::load(&index)?;
            let exclusions: HashSet<String> = exclude.into_iter().collect();
            for m in index.query_top_n(&text, n, &exclusions) {
                println!("{}", serde_json::to_string(&m)?);
            }
        }
        Cmd::Augment {
            index,
            corpus,
            format,
            mode,
            k,
            pool,
            seed,
            separator,
            exclude_self,
            keep_sampled_order,
            out,
        } => {
            let index = TmIndex::load(&index)?;
            let tm = load(&corpus, format.as_deref())?;
            let cfg = AugmentationConfig {
                k,
                pool_size: pool,
                mode: match mode {
                    Mode::Topk => SamplingMode::Topk,
                    Mode::Shuffle => SamplingMode::Shuffle,
                },
                seed,
                exclude_self,
                separator,
                keep_sampled_order,
            };
            let examples = augment::augment_corpus(&tm, &index, &cfg)?;
            let files = augment::write_augmented(&out, &examples)?;
            eprintln!(
                "wrote {} examples to {}",
                examples.len(),
                files.jsonl.display()
            );
        }
        Cmd::Scenario {
            test_domain,
            relevance,
            tms,
            bm25,
            out,
        } => {
            let relevance = match relevance {
                RelevanceArg::Relevant => Relevance::Relevant,
                RelevanceArg::LessRelevant => Relevance::LessRelevant,
            };
            let tms = tms
                .iter()
                .map(|p| load(p, None))
                .collect::<Result<Vec<_>>>()?;
            let (spec, index) = build_scenario(&test_domain, &tms, relevance, bm25.params()?)?;
            index.save(&out)?;
            let mut sidecar = out.clone().into_os_string();
            sidecar.push(".scenario.json");
            write_json(Path::new(&sidecar), &spec)?;
            eprintln!(
                "{} scenario for {}: {} pairs from {:?}",
                relevance,
                test_domain,
                index.doc_count(),
                spec.resolved_domains
            );
        }
        Cmd::Bleu {
            hyp,
            reference,
            json,
        } => {
            let hyps = augment::read_lines(&hyp)?;
            let refs = augment::read_lines(&reference)?;
            let score = eval::bleu_corpus(&hyps, &refs)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&score)?);
            } else {
                let p = score.precisions.map(|p| p * 100.0);
                println!(
                    "BLEU = {:.2} {:.1}/{:.1}/{:.1}/{:.1} (BP = {:.3} ratio = {:.3} hyp_len = {} ref_len = {}) {}",
                    score.score,
                    p[0],
                    p[1],
                    p[2],
                    p[3],
                    score.brevity_penalty,
                    score.hyp_length as f64 / score.ref_length.max(1) as f64,
                    score.hyp_length,
                    score.ref_length,
                    eval::SIGNATURE
                );
            }
        }
        Cmd::Overlap {
            augmented,
            hyp,
            counting,
            averaging,
        } => {
            let examples = augment::load_augmented(&augmented)?;
            let hyps = augment::read_lines(&hyp)?;
            let counting = match counting {
                Counting::Type => OverlapCounting::TypeMembership,
                Counting::Clipped => OverlapCounting::Clipped,
            };
            let averaging = match averaging {
                Averaging::PerSentence => OverlapAveraging::PerSentence,
                Averaging::Pooled => OverlapAveraging::Pooled,
            };
            let res = eval::suggestion_overlap_with(&examples, &hyps, counting, averaging)?;
            match res.mean_percent {
                Some(v) => println!("{v:.2}"),
                None => println!("n/a (no suggestion tokens)"),
            }
        }
        Cmd::Compare {
            hyp_a,
            hyp_b,
            reference,
            bootstrap,
            p_thresh,
            seed,
        } => {
            let a = augment::read_lines(&hyp_a)?;
            let b = augment::read_lines(&hyp_b)?;
            let r = augment::read_lines(&reference)?;
            let res = eval::paired_bootstrap(&a, &b, &r, bootstrap, p_thresh, seed)?;
            println!("{}", serde_json::to_string_pretty(&res)?);
        }
        Cmd::Report { cells, out } => {
            let cells = pipeline::load_cells(&cells)?;
            if cells.is_empty() {
                bail!("no cell.json files found");
            }
            let report = eval::aggregate_report(cells, Vec::new())?;
            write_json(&out, &report)?;
            std::fs::write(out.with_extension("md"), report.to_markdown())
                .context("writing markdown report")?;
        }
        Cmd::Run { manifest, workers } => {
            let m = Manifest::load(&manifest)?;
            let report = pipeline::run_experiment(&m, workers)?;
            for f in &report.failed_cells {
                eprintln!("cell {} failed: {}", f.key, f.error);
            }
            eprintln!(
                "{} cells completed, {} failed; report in {}",
                report.report.cells.len(),
                report.failed_cells.len(),
                m.out_dir.join("report.json").display()
            );
            if !report.all_completed() {
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::Synth {
            out,
            domains,
            topics,
            seed,
        } => {
            let cfg = SynthConfig {
                domains: domains.clone(),
                topics_per_domain: topics,
                seed,
                ..Default::default()
            };
            let corpus = synth::generate(&cfg)?;
            let (tms, tests) = corpus.write_to_dir(&out)?;
            let rel = |p: &Path| p.strip_prefix(&out).unwrap_or(p).to_path_buf();
            let manifest = Manifest {
                tms: tms.iter().map(|p| rel(p)).collect(),
                test_sets: tests.iter().map(|(d, p)| (d.clone(), rel(p))).collect(),
                domains,
                k_values: vec![1, 2, 3],
                scenarios: vec![Relevance::Relevant, Relevance::LessRelevant],
                augmentation: Default::default(),
                translator: TranslatorSpec::BaselineCopyFirst,
                bootstrap: Default::default(),
                out_dir: PathBuf::from("results"),
                bm25: Default::default(),
                system: None,
            };
            write_json(&out.join("manifest.json"), &manifest)?;
            eprintln!("wrote synthetic corpus and manifest.json to {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
