//! Step-grounding metrics and judge-reliability statistics.
//!
//! The evaluation headline is a four-column table — answer accuracy, anchor
//! rate, mean grounding score (mIoU), and Hit@0.5 — plus, when several
//! judges scored the same run, pairwise agreement and kappa statistics over
//! their verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{ChainOfTime, TaskType, TimeAnchor};
use crate::parser::ParsedOutput;
use crate::reward::{correctness_reward, coverage_reward};

/// Per-sample evaluation record the aggregates are computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgaRecord {
    pub sample_id: String,
    /// Fraction of this output's steps that cite an anchor.
    pub anchor_rate: f64,
    /// Best-match temporal alignment against the reference anchors.
    pub grounding_score: f64,
    /// Answer verdict; `None` when the sample could not be scored.
    pub correct: Option<bool>,
}

/// Strict interval IoU with points as zero-width spans: identical points
/// score 1, any other zero-measure overlap scores 0. This deliberately does
/// NOT apply the distance-aware point credit used by the reward — it is the
/// harsher variant reported alongside.
pub fn span_iou(a: &TimeAnchor, b: &TimeAnchor) -> f64 {
    let (s1, e1) = (a.start_s(), a.end_s());
    let (s2, e2) = (b.start_s(), b.end_s());
    let inter = (e1.min(e2) - s1.max(s2)).max(0.0);
    let union = (e1 - s1) + (e2 - s2) - inter;
    if union <= 0.0 {
        // Both zero-width.
        if s1 == s2 {
            1.0
        } else {
            0.0
        }
    } else {
        inter / union
    }
}

/// Per-sample temporal alignment: for each reference anchor, the best
/// similarity any predicted anchor achieves, averaged over reference
/// anchors. Shares the reward engine's implementation so evaluation and
/// training cannot drift apart.
pub fn sample_grounding_score(
    pred: &ChainOfTime,
    reference: &ChainOfTime,
    point_tolerance_s: f64,
) -> Result<f64, Error> {
    correctness_reward(
        &reference.all_anchors(),
        &pred.all_anchors(),
        point_tolerance_s,
    )
}

/// Same aggregation as [`sample_grounding_score`] but scored with strict
/// [`span_iou`] (no distance credit for near-miss points).
pub fn sample_grounding_score_strict(
    pred: &ChainOfTime,
    reference: &ChainOfTime,
) -> Result<f64, Error> {
    let gt = reference.all_anchors();
    if gt.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let preds = pred.all_anchors();
    let sum: f64 = gt
        .iter()
        .map(|g| preds.iter().map(|p| span_iou(g, p)).fold(0.0, f64::max))
        .sum();
    Ok(sum / gt.len() as f64)
}

/// Fraction of scores strictly greater than `tau`.
pub fn hit_at(scores: &[f64], tau: f64) -> Result<f64, Error> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("hit_at needs at least one score"));
    }
    let hits = scores.iter().filter(|&&s| s > tau).count();
    Ok(hits as f64 / scores.len() as f64)
}

/// Mean per-output step coverage (the dataset mean of the coverage reward).
/// Outputs with zero steps contribute zero.
pub fn anchor_rate(parsed_outputs: &[ParsedOutput]) -> Result<f64, Error> {
    if parsed_outputs.is_empty() {
        return Err(Error::EmptyInput("anchor_rate needs at least one output"));
    }
    let sum: f64 = parsed_outputs
        .iter()
        .map(|p| coverage_reward(&p.chain.steps))
        .sum();
    Ok(sum / parsed_outputs.len() as f64)
}

/// Alternative anchor statistic: fraction of outputs with at least one
/// anchored step, regardless of how many steps lack anchors.
pub fn anchor_presence_rate(parsed_outputs: &[ParsedOutput]) -> Result<f64, Error> {
    if parsed_outputs.is_empty() {
        return Err(Error::EmptyInput("anchor_presence_rate needs at least one output"));
    }
    let present = parsed_outputs
        .iter()
        .filter(|p| p.chain.steps.iter().any(|s| s.is_anchored()))
        .count();
    Ok(present as f64 / parsed_outputs.len() as f64)
}

/// Mean over unordered judge pairs of the fraction of samples the pair
/// agrees on. Verdict lists must be aligned index-by-index to the same
/// samples.
pub fn pairwise_agreement(verdicts: &BTreeMap<String, Vec<bool>>) -> Result<f64, Error> {
    if verdicts.len() < 2 {
        return Err(Error::EmptyInput("pairwise agreement needs >= 2 judges"));
    }
    let judges: Vec<(&String, &Vec<bool>)> = verdicts.iter().collect();
    let len = judges[0].1.len();
    if len == 0 {
        return Err(Error::EmptyInput("pairwise agreement needs >= 1 sample"));
    }
    for (id, v) in &judges {
        if v.len() != len {
            return Err(Error::LengthMismatch {
                what: "judge verdicts",
                left: len,
                right: v.len(),
            });
        }
        let _ = id;
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..judges.len() {
        for j in i + 1..judges.len() {
            let agree = judges[i]
                .1
                .iter()
                .zip(judges[j].1.iter())
                .filter(|(a, b)| a == b)
                .count();
            total += agree as f64 / len as f64;
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

/// Fleiss' kappa over an N-items x K-categories count matrix; every row must
/// sum to the same rater count n >= 2.
///
/// Perfect observed agreement returns exactly 1.0 even when the expected
/// agreement is also 1 (all raters, all items, one category); expected
/// agreement of 1 with imperfect observed agreement is a degenerate marginal
/// and errors.
pub fn fleiss_kappa(counts: &[Vec<u32>]) -> Result<f64, Error> {
    if counts.is_empty() {
        return Err(Error::EmptyInput("fleiss_kappa needs at least one item"));
    }
    let k = counts[0].len();
    if k < 2 {
        return Err(Error::InvalidRatingMatrix(format!(
            "need >= 2 categories, got {k}"
        )));
    }
    let n: u32 = counts[0].iter().sum();
    if n < 2 {
        return Err(Error::InvalidRatingMatrix(format!(
            "need >= 2 raters per item, got {n}"
        )));
    }
    for (i, row) in counts.iter().enumerate() {
        if row.len() != k {
            return Err(Error::InvalidRatingMatrix(format!(
                "row {i} has {} categories, expected {k}",
                row.len()
            )));
        }
        let sum: u32 = row.iter().sum();
        if sum != n {
            return Err(Error::InvalidRatingMatrix(format!(
                "row {i} sums to {sum}, expected {n}"
            )));
        }
    }
    let items = counts.len() as f64;
    let nf = n as f64;
    let p_bar: f64 = counts
        .iter()
        .map(|row| {
            let sq: f64 = row.iter().map(|&c| (c as f64) * (c as f64)).sum();
            (sq - nf) / (nf * (nf - 1.0))
        })
        .sum::<f64>()
        / items;
    if p_bar >= 1.0 {
        return Ok(1.0);
    }
    let p_e: f64 = (0..k)
        .map(|j| {
            let col: f64 = counts.iter().map(|row| row[j] as f64).sum();
            let p = col / (items * nf);
            p * p
        })
        .sum();
    if p_e >= 1.0 {
        return Err(Error::DegenerateAgreement { observed: p_bar });
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

/// Cohen's kappa between two aligned boolean verdict vectors. Identical
/// vectors score exactly 1.0 even when the marginals make expected
/// agreement 1.
pub fn cohen_kappa(a: &[bool], b: &[bool]) -> Result<f64, Error> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: "cohen_kappa vectors",
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("cohen_kappa needs at least one verdict"));
    }
    if a == b {
        return Ok(1.0);
    }
    let n = a.len() as f64;
    let p_o = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let pa = a.iter().filter(|&&x| x).count() as f64 / n;
    let pb = b.iter().filter(|&&x| x).count() as f64 / n;
    let p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
    if p_e >= 1.0 {
        // Unreachable after the identity early-return, kept as a guard.
        return Err(Error::DegenerateAgreement { observed: p_o });
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Accuracy broken down by task category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskBreakdown {
    /// Accuracy per category, absent categories omitted.
    pub per_task: BTreeMap<TaskType, f64>,
    /// Unweighted mean over the present categories.
    pub macro_avg: f64,
    /// Plain per-sample mean, for transparency alongside the macro average.
    pub micro_avg: f64,
}

/// Compute per-category accuracies plus the unweighted (macro) average over
/// whichever categories actually appear.
pub fn task_breakdown(records: &[(TaskType, bool)]) -> Result<TaskBreakdown, Error> {
    if records.is_empty() {
        return Err(Error::EmptyInput("task_breakdown needs at least one record"));
    }
    let mut hit: BTreeMap<TaskType, (usize, usize)> = BTreeMap::new();
    for &(task, correct) in records {
        let e = hit.entry(task).or_insert((0, 0));
        e.1 += 1;
        if correct {
            e.0 += 1;
        }
    }
    let per_task: BTreeMap<TaskType, f64> = hit
        .iter()
        .map(|(&t, &(c, n))| (t, c as f64 / n as f64))
        .collect();
    let macro_avg = per_task.values().sum::<f64>() / per_task.len() as f64;
    let micro_avg =
        records.iter().filter(|(_, c)| *c).count() as f64 / records.len() as f64;
    Ok(TaskBreakdown {
        per_task,
        macro_avg,
        micro_avg,
    })
}
