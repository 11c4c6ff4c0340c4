//! End-to-end orchestration: index → scenario → augment → translate →
//! evaluate.

mod experiment;
mod manifest;
mod translator;

pub use experiment::{
    load_cells, run_experiment, CellFailure, ExperimentReport, ScenarioCheck, CELL_FILE,
};
pub use manifest::{BootstrapConfig, Manifest, TestAugmentation};
pub use translator::{translate, translate_in, TranslatorSpec, INPUT_PLACEHOLDER, OUTPUT_PLACEHOLDER};
