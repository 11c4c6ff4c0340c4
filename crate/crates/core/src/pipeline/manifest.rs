use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::translator::TranslatorSpec;
use crate::augment::{AugmentationConfig, SamplingMode, DEFAULT_POOL_SIZE, DEFAULT_SEPARATOR};
use crate::bm25::Bm25Params;
use crate::eval::{DEFAULT_BOOTSTRAP, DEFAULT_THRESHOLD};
use crate::scenario::Relevance;
use crate::{Error, Result};

/// Augmentation settings shared by every cell; `k` comes from the grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestAugmentation {
    pub mode: SamplingMode,
    pub pool: usize,
    pub seed: u64,
    pub separator: String,
    pub exclude_self: bool,
}

impl Default for TestAugmentation {
    fn default() -> Self {
        Self {
            mode: SamplingMode::Topk,
            pool: DEFAULT_POOL_SIZE,
            seed: 0,
            separator: DEFAULT_SEPARATOR.into(),
            exclude_self: false,
        }
    }
}

impl TestAugmentation {
    pub fn for_k(&self, k: usize) -> AugmentationConfig {
        AugmentationConfig {
            k,
            pool_size: self.pool.max(k),
            mode: self.mode,
            seed: self.seed,
            exclude_self: self.exclude_self,
            separator: self.separator.clone(),
            keep_sampled_order: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapConfig {
    pub n: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_BOOTSTRAP,
            threshold: DEFAULT_THRESHOLD,
            seed: 0,
        }
    }
}

/// Declarative description of an experiment grid (domain × k × scenario).
///
/// Relative paths are resolved against the manifest's directory by
/// [`Manifest::load`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Translation memory files (JSONL or TSV, chosen by extension).
    pub tms: Vec<PathBuf>,
    /// Test set file per domain.
    pub test_sets: BTreeMap<String, PathBuf>,
    pub domains: Vec<String>,
    pub k_values: Vec<usize>,
    pub scenarios: Vec<Relevance>,
    #[serde(default)]
    pub augmentation: TestAugmentation,
    pub translator: TranslatorSpec,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub bm25: Bm25Params,
    /// Report name for the translator; defaults to its kind.
    #[serde(default)]
    pub system: Option<String>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let mut m = Self::from_json(&text)?;
        if let Some(base) = path.parent() {
            m.resolve_paths(base);
        }
        Ok(m)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.tms.iter_mut().for_each(fix);
        self.test_sets.values_mut().for_each(fix);
        fix(&mut self.out_dir);
    }

    pub fn system_name(&self) -> String {
        self.system
            .clone()
            .unwrap_or_else(|| self.translator.label().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("manifest lists no {what}")))
            }
        };
        nonempty(!self.tms.is_empty(), "tms")?;
        nonempty(!self.domains.is_empty(), "domains")?;
        nonempty(!self.k_values.is_empty(), "k_values")?;
        nonempty(!self.scenarios.is_empty(), "scenarios")?;
        let mut doms = self.domains.clone();
        doms.sort();
        doms.dedup();
        if doms.len() != self.domains.len() {
            return Err(Error::Config("duplicate domain in manifest".into()));
        }
        let mut ks = self.k_values.clone();
        ks.sort();
        ks.dedup();
        if ks.len() != self.k_values.len() || ks[0] == 0 {
            return Err(Error::Config("k_values must be distinct and >= 1".into()));
        }
        for &k in &self.k_values {
            self.augmentation.for_k(k).validate()?;
        }
        if self.bootstrap.n == 0 || !(0.0..=1.0).contains(&self.bootstrap.threshold) {
            return Err(Error::Config("bootstrap needs n >= 1 and threshold in [0, 1]".into()));
        }
        self.bm25.validate()?;
        self.translator.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "tms": ["tm.jsonl"],
        "test_sets": {"it": "test_it.jsonl"},
        "domains": ["it"],
        "k_values": [1, 2],
        "scenarios": ["relevant", "less_relevant"],
        "translator": {"kind": "baseline_copy_first"},
        "out_dir": "out"
    }"#;

    #[test]
    fn defaults_and_resolution() {
        let mut m = Manifest::from_json(MINIMAL).unwrap();
        assert_eq!(m.bootstrap.n, 1000);
        assert_eq!(m.bootstrap.threshold, 0.05);
        assert_eq!(m.augmentation.pool, 10);
        assert_eq!(m.system_name(), "copy_first");
        m.resolve_paths(Path::new("/data/exp"));
        assert_eq!(m.tms[0], Path::new("/data/exp/tm.jsonl"));
        assert_eq!(m.out_dir, Path::new("/data/exp/out"));
    }

    #[test]
    fn rejects_bad_grids() {
        let bad = MINIMAL.replace("[1, 2]", "[0]");
        assert!(Manifest::from_json(&bad).is_err());
        let bad = MINIMAL.replace("[1, 2]", "[2, 2]");
        assert!(Manifest::from_json(&bad).is_err());
        let bad = MINIMAL.replace("\"domains\": [\"it\"]", "\"domains\": []");
        assert!(Manifest::from_json(&bad).is_err());
        let bad = MINIMAL.replace("\"out_dir\"", "\"unknown\": 1, \"out_dir\"");
        assert!(Manifest::from_json(&bad).is_err());
    }
}
