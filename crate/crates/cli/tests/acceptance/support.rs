//! Shared helpers for the acceptance suite.

#![allow(dead_code)]

use std::path::PathBuf;

use cot_cli::config::{EvalSettings, JudgeSettings, Settings};
use cot_cli::dataset::{load_dataset, load_predictions, LoadedDataset, LoadedPredictions};
use cot_core::reward::AccuracyMode;
use cot_core::RewardConfig;

pub fn pass(criterion: u32, what: &str) {
    println!("[PASS] criterion {criterion}: {what}");
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn synthetic50() -> LoadedDataset {
    let ds = load_dataset(&fixture("synthetic50.jsonl")).expect("bundled dataset loads");
    assert_eq!(ds.samples.len(), crate::frozen::SAMPLE_COUNT);
    assert!(ds.invalid.is_empty(), "bundled dataset has invalid lines: {:?}", ds.invalid);
    ds
}

pub fn predictions(name: &str) -> LoadedPredictions {
    load_predictions(&fixture(name)).expect("bundled predictions load")
}

/// Settings with the deterministic mock judge engaged through the external
/// judge code path.
pub fn mock_judge_settings() -> Settings {
    Settings {
        reward: RewardConfig::default(),
        eval: EvalSettings {
            accuracy_mode: AccuracyMode::ExternalJudge,
            ..EvalSettings::default()
        },
        judge: JudgeSettings { mock: true, ..JudgeSettings::default() },
    }
}

/// Mean in the same left-to-right association the evaluator uses.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn hit_fraction(xs: &[f64], tau: f64) -> f64 {
    xs.iter().filter(|&&x| x > tau).count() as f64 / xs.len() as f64
}
