//! The translator seam. Real systems are external processes that read one
//! flat input per line and write one output per line; the baselines exist to
//! drive the pipeline without a trained model.

use std::collections::HashSet;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::augment::{read_lines, write_lines, AugmentedExample};
use crate::corpus::tokenize_13a;
use crate::{Error, Result};

pub const INPUT_PLACEHOLDER: &str = "{input}";
pub const OUTPUT_PLACEHOLDER: &str = "{output}";

fn default_timeout() -> u64 {
    600
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TranslatorSpec {
    /// Shell command template with `{input}` and `{output}` placeholders,
    /// e.g. `my-decoder --src {input} --out {output}`.
    ExternalCommand {
        command: String,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
    /// Emits the source sentence.
    BaselinePassthrough,
    /// Emits the first suggestion, or the source when there is none.
    BaselineCopyFirst,
    /// Emits the suggestion sharing the most 13a token types with the
    /// reference. Needs references, so only meaningful in tests.
    BaselineOracleCopy,
}

impl TranslatorSpec {
    pub fn validate(&self) -> Result<()> {
        if let TranslatorSpec::ExternalCommand { command, timeout_secs } = self {
            if command.trim().is_empty()
                || !command.contains(INPUT_PLACEHOLDER)
                || !command.contains(OUTPUT_PLACEHOLDER)
            {
                return Err(Error::Config(format!(
                    "external command must contain {INPUT_PLACEHOLDER} and {OUTPUT_PLACEHOLDER}: {command:?}"
                )));
            }
            if *timeout_secs == 0 {
                return Err(Error::Config("timeout_secs must be positive".into()));
            }
        }
        Ok(())
    }

    /// Short system name used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            TranslatorSpec::ExternalCommand { .. } => "external",
            TranslatorSpec::BaselinePassthrough => "passthrough",
            TranslatorSpec::BaselineCopyFirst => "copy_first",
            TranslatorSpec::BaselineOracleCopy => "oracle_copy",
        }
    }
}

/// Translate in a scratch directory that is removed afterwards.
pub fn translate(spec: &TranslatorSpec, examples: &[AugmentedExample]) -> Result<Vec<String>> {
    let dir = tempfile::tempdir().map_err(|e| Error::io("creating scratch directory", e))?;
    translate_in(spec, examples, dir.path())
}

/// Translate, keeping external-process files (`input.txt`, `output.txt`,
/// `stderr.txt`) in `workdir`.
pub fn translate_in(
    spec: &TranslatorSpec,
    examples: &[AugmentedExample],
    workdir: &Path,
) -> Result<Vec<String>> {
    spec.validate()?;
    if examples.is_empty() {
        return Err(Error::Contract("nothing to translate".into()));
    }
    match spec {
        TranslatorSpec::BaselinePassthrough => {
            Ok(examples.iter().map(|e| e.source.clone()).collect())
        }
        TranslatorSpec::BaselineCopyFirst => Ok(examples
            .iter()
            .map(|e| {
                e.suggestions
                    .first()
                    .map_or_else(|| e.source.clone(), |s| s.target.clone())
            })
            .collect()),
        TranslatorSpec::BaselineOracleCopy => examples.iter().map(oracle_copy).collect(),
        TranslatorSpec::ExternalCommand {
            command,
            timeout_secs,
        } => run_external(
            command,
            Duration::from_secs(*timeout_secs),
            examples,
            workdir,
        ),
    }
}

fn oracle_copy(ex: &AugmentedExample) -> Result<String> {
    if ex.reference.is_empty() {
        return Err(Error::Translator(format!(
            "oracle_copy needs a reference for {:?}",
            ex.pair_id
        )));
    }
    let ref_types: HashSet<String> = tokenize_13a(&ex.reference).into_iter().collect();
    let mut best: Option<(usize, &str)> = None;
    for s in &ex.suggestions {
        let types: HashSet<String> = tokenize_13a(&s.target).into_iter().collect();
        let shared = types.intersection(&ref_types).count();
        if best.is_none_or(|(b, _)| shared > b) {
            best = Some((shared, &s.target));
        }
    }
    Ok(best.map_or_else(|| ex.source.clone(), |(_, t)| t.to_string()))
}

fn shell_quote(path: &Path) -> String {
    format!("'{}'", path.display().to_string().replace('\'', r"'\''"))
}

fn run_external(
    template: &str,
    timeout: Duration,
    examples: &[AugmentedExample],
    workdir: &Path,
) -> Result<Vec<String>> {
    let input = workdir.join("input.txt");
    let output = workdir.join("output.txt");
    let stderr_path = workdir.join("stderr.txt");
    write_lines(&input, examples.iter().map(|e| e.flat_input.as_str()))?;
    let _ = std::fs::remove_file(&output);
    let cmdline = template
        .replace(INPUT_PLACEHOLDER, &shell_quote(&input))
        .replace(OUTPUT_PLACEHOLDER, &shell_quote(&output));
    let stderr = std::fs::File::create(&stderr_path)
        .map_err(|e| Error::io(format!("creating {}", stderr_path.display()), e))?;

    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&cmdline)
        .current_dir(workdir)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(stderr)
        .spawn()
        .map_err(|e| Error::Translator(format!("spawning {cmdline:?}: {e}")))?;
    let started = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if started.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(Error::Translator(format!(
                    "{cmdline:?} timed out after {}s",
                    timeout.as_secs()
                )));
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            Err(e) => return Err(Error::Translator(format!("waiting for {cmdline:?}: {e}"))),
        }
    };
    let tail = || {
        let text = std::fs::read_to_string(&stderr_path).unwrap_or_default();
        let lines: Vec<&str> = text.lines().collect();
        lines[lines.len().saturating_sub(5)..].join("\n")
    };
    if !status.success() {
        return Err(Error::Translator(format!(
            "{cmdline:?} exited with {status}; stderr tail:\n{}",
            tail()
        )));
    }
    let lines = read_lines(&output)
        .map_err(|e| Error::Translator(format!("reading translator output: {e}")))?;
    if lines.len() != examples.len() {
        return Err(Error::Translator(format!(
            "translator produced {} lines for {} inputs",
            lines.len(),
            examples.len()
        )));
    }
    Ok(lines)
}
