//! JSONL ingestion for samples, predictions and judge verdicts.
//!
//! Loading is forgiving where it can be: individually malformed lines are
//! reported with their line numbers and skipped, and reference anchors that
//! arrive with swapped or out-of-range endpoints are normalized with a
//! warning. A file with *zero* usable sample lines is a fatal error.

use std::collections::BTreeMap;
use std::path::Path;

use cot_core::model::{normalize_anchor, Sample, TimeAnchor};
use cot_core::JudgeVerdict;
use serde::Deserialize;

use crate::{CliError, Result};

/// A line that failed to parse or validate, with its 1-based line number.
#[derive(Debug, Clone)]
pub struct LineIssue {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for LineIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Result of loading a dataset file.
#[derive(Debug)]
pub struct LoadedDataset {
    pub samples: Vec<Sample>,
    /// Non-fatal oddities (e.g. anchors normalized during load).
    pub warnings: Vec<LineIssue>,
    /// Lines dropped entirely.
    pub invalid: Vec<LineIssue>,
}

/// Loads samples from a JSONL file. Returns `Err` only when the file cannot
/// be read or contains no valid sample at all; otherwise skipped lines are
/// reported in `invalid` and the rest are returned.
pub fn load_dataset(path: &Path) -> Result<LoadedDataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Dataset(format!("cannot read {}: {e}", path.display())))?;
    let mut out = LoadedDataset { samples: Vec::new(), warnings: Vec::new(), invalid: Vec::new() };
    let mut seen_ids: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut sample: Sample = match serde_json::from_str(line) {
            Ok(s) => s,
            Err(e) => {
                out.invalid.push(LineIssue { line: lineno, message: format!("bad sample json: {e}") });
                continue;
            }
        };
        if let Some(prev) = seen_ids.get(&sample.sample_id) {
            out.invalid.push(LineIssue {
                line: lineno,
                message: format!("duplicate sample_id {:?} (first seen on line {prev})", sample.sample_id),
            });
            continue;
        }
        match normalize_sample_anchors(&mut sample) {
            Ok(notes) => {
                for note in notes {
                    out.warnings.push(LineIssue { line: lineno, message: note });
                }
            }
            Err(e) => {
                out.invalid.push(LineIssue { line: lineno, message: e.to_string() });
                continue;
            }
        }
        if let Err(e) = sample.validate() {
            out.invalid.push(LineIssue { line: lineno, message: e.to_string() });
            continue;
        }
        seen_ids.insert(sample.sample_id.clone(), lineno);
        out.samples.push(sample);
    }

    if out.samples.is_empty() {
        return Err(CliError::Dataset(format!(
            "{}: no valid samples ({} invalid lines)",
            path.display(),
            out.invalid.len()
        )));
    }
    Ok(out)
}

/// Re-normalizes every reference anchor against the sample's duration,
/// returning human-readable notes for anchors that had to change (swapped
/// endpoints, clamping, span collapse).
fn normalize_sample_anchors(sample: &mut Sample) -> cot_core::Result<Vec<String>> {
    let duration = sample.duration_s;
    let mut notes = Vec::new();
    for (si, step) in sample.reference_chain.steps.iter_mut().enumerate() {
        for (ai, anchor) in step.anchors.iter_mut().enumerate() {
            let (start, end) = match *anchor {
                TimeAnchor::Point(p) => (p, None),
                TimeAnchor::Span { start_s, end_s } => (start_s, Some(end_s)),
            };
            let normalized = normalize_anchor(start, end, duration)?;
            if normalized != *anchor {
                let reason = match (&*anchor, &normalized) {
                    (TimeAnchor::Span { start_s, end_s }, _) if end_s < start_s => "endpoints swapped",
                    (_, TimeAnchor::Point(_)) if end.is_some() => "span collapsed to a point",
                    _ => "clamped to video duration",
                };
                notes.push(format!(
                    "sample {:?} step {} anchor {}: {reason}",
                    sample.sample_id,
                    si + 1,
                    ai + 1
                ));
                *anchor = normalized;
            }
        }
    }
    Ok(notes)
}

#[derive(Debug, Deserialize)]
struct PredictionLine {
    sample_id: String,
    raw_text: String,
}

/// Result of loading a predictions file.
#[derive(Debug)]
pub struct LoadedPredictions {
    /// sample_id -> raw model output. First occurrence wins.
    pub by_sample: BTreeMap<String, String>,
    pub invalid: Vec<LineIssue>,
}

/// Loads predictions (`{"sample_id", "raw_text"}` per line). Unlike dataset
/// loading, an empty predictions file is not fatal: it simply means nothing
/// was predicted, which `eval` will report as missing predictions.
pub fn load_predictions(path: &Path) -> Result<LoadedPredictions> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Dataset(format!("cannot read {}: {e}", path.display())))?;
    let mut out = LoadedPredictions { by_sample: BTreeMap::new(), invalid: Vec::new() };
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<PredictionLine>(line) {
            Ok(p) => {
                if out.by_sample.contains_key(&p.sample_id) {
                    out.invalid.push(LineIssue {
                        line: lineno,
                        message: format!("duplicate prediction for {:?} ignored", p.sample_id),
                    });
                } else {
                    out.by_sample.insert(p.sample_id, p.raw_text);
                }
            }
            Err(e) => {
                out.invalid.push(LineIssue { line: lineno, message: format!("bad prediction json: {e}") });
            }
        }
    }
    Ok(out)
}

/// Loads judge verdicts (`JudgeVerdict` per line) keyed by sample id.
pub fn load_verdicts(path: &Path) -> Result<BTreeMap<String, JudgeVerdict>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Dataset(format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: JudgeVerdict = serde_json::from_str(line)
            .map_err(|e| CliError::Dataset(format!("{}:{}: bad verdict: {e}", path.display(), idx + 1)))?;
        out.insert(v.sample_id.clone(), v);
    }
    Ok(out)
}
