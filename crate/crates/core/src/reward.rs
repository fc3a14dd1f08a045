//! The composite reward: format + answer accuracy + temporal grounding.
//!
//! `total = lambda_fmt * r_fmt + lambda_acc * r_acc + lambda_temporal * r_temporal`
//! where `r_temporal = alpha * coverage + (1 - alpha) * correctness`.
//! Coverage asks "does each step cite an anchor?", correctness asks "are the
//! cited anchors near the annotated ones?" — each ground-truth anchor takes
//! its best match against the predictions (reuse allowed, no assignment).

use crate::error::Error;
use crate::model::{ReasoningStep, RewardBreakdown, RewardConfig, Sample, TimeAnchor};
use crate::parser::ParsedOutput;

/// How the answer-correctness component is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyMode {
    /// Case-folded, punctuation-stripped, whitespace-collapsed equality.
    ExactNormalized,
    /// Normalized substring containment in either direction.
    Containment,
    /// Delegate to an [`AnswerJudge`] (e.g. an LLM behind an HTTP client).
    ExternalJudge,
}

impl std::str::FromStr for AccuracyMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact_normalized" | "exact" => Ok(AccuracyMode::ExactNormalized),
            "containment" => Ok(AccuracyMode::Containment),
            "external_judge" | "judge" => Ok(AccuracyMode::ExternalJudge),
            other => Err(format!("unknown accuracy mode: {other:?}")),
        }
    }
}

/// Something that can decide whether a predicted answer is correct for a
/// question. The harness provides an HTTP-backed implementation and a
/// deterministic mock; transport trouble must surface as
/// [`Error::JudgeTransport`], never as a silent "incorrect".
pub trait AnswerJudge {
    fn judge(&self, question: &str, reference_answer: &str, pred_answer: &str)
        -> Result<bool, Error>;
}

/// Binary structural reward: 1 iff the output followed the tag format.
pub fn format_reward(parsed: &ParsedOutput) -> f64 {
    if parsed.format_ok {
        1.0
    } else {
        0.0
    }
}

/// Lowercase, drop punctuation (replaced by spaces so hyphenated words still
/// separate), collapse runs of whitespace.
pub fn normalize_answer(text: &str) -> String {
    let lowered = text.to_lowercase();
    let mapped: String = lowered
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Answer-correctness reward in [0,1].
///
/// The question rides along because judge protocols need it; the string
/// modes ignore it. In `Containment` mode an empty normalized side never
/// counts as contained (the empty string is a substring of everything, which
/// would hand out free credit).
pub fn accuracy_reward(
    pred_answer: &str,
    reference_answer: &str,
    question: &str,
    mode: AccuracyMode,
    judge: Option<&dyn AnswerJudge>,
) -> Result<f64, Error> {
    let hit = match mode {
        AccuracyMode::ExactNormalized => {
            normalize_answer(pred_answer) == normalize_answer(reference_answer)
        }
        AccuracyMode::Containment => {
            let p = normalize_answer(pred_answer);
            let r = normalize_answer(reference_answer);
            if p.is_empty() || r.is_empty() {
                p == r
            } else {
                p.contains(&r) || r.contains(&p)
            }
        }
        AccuracyMode::ExternalJudge => {
            let judge = judge.ok_or(Error::MissingJudge)?;
            judge.judge(question, reference_answer, pred_answer)?
        }
    };
    Ok(if hit { 1.0 } else { 0.0 })
}

/// Fraction of steps citing at least one anchor; an empty step list scores 0
/// rather than erroring so degenerate rollouts still get a valid low reward.
pub fn coverage_reward(pred_steps: &[ReasoningStep]) -> f64 {
    if pred_steps.is_empty() {
        return 0.0;
    }
    let anchored = pred_steps.iter().filter(|s| s.is_anchored()).count();
    anchored as f64 / pred_steps.len() as f64
}

/// Linear credit ramp: full credit at distance 0, none at or beyond the
/// tolerance. Total even for junk tolerances (d = 0 always scores 1).
fn ramp(distance: f64, tolerance: f64) -> f64 {
    if distance <= 0.0 {
        1.0
    } else if tolerance <= 0.0 {
        0.0
    } else {
        (1.0 - distance / tolerance).max(0.0)
    }
}

/// Similarity between two anchors in [0,1]: interval IoU for span–span,
/// a distance ramp for point–point, and for point–span full credit inside
/// the span with the ramp applied to the gap outside it.
pub fn anchor_similarity(gt: &TimeAnchor, pred: &TimeAnchor, point_tolerance_s: f64) -> f64 {
    use TimeAnchor::*;
    match (gt, pred) {
        (Point(p), Point(q)) => ramp((p - q).abs(), point_tolerance_s),
        (Span { .. }, Span { .. }) => {
            let (s1, e1) = (gt.start_s(), gt.end_s());
            let (s2, e2) = (pred.start_s(), pred.end_s());
            let inter = (e1.min(e2) - s1.max(s2)).max(0.0);
            let union = (e1 - s1) + (e2 - s2) - inter;
            if union <= 0.0 {
                // Both zero-width: identical instants match, others don't.
                if s1 == s2 {
                    1.0
                } else {
                    0.0
                }
            } else {
                inter / union
            }
        }
        (Point(p), span) | (span, Point(p)) => {
            let (s, e) = (span.start_s(), span.end_s());
            if *p >= s && *p <= e {
                1.0
            } else {
                let gap = if *p < s { s - *p } else { *p - e };
                ramp(gap, point_tolerance_s)
            }
        }
    }
}

/// Mean over ground-truth anchors of the best similarity achieved by any
/// predicted anchor. Predictions may be reused across ground-truth anchors;
/// no predictions at all means zero. Errors when there is no ground truth —
/// callers must skip samples without reference anchors.
pub fn correctness_reward(
    gt_anchors: &[TimeAnchor],
    pred_anchors: &[TimeAnchor],
    point_tolerance_s: f64,
) -> Result<f64, Error> {
    if gt_anchors.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let sum: f64 = gt_anchors
        .iter()
        .map(|gt| {
            pred_anchors
                .iter()
                .map(|p| anchor_similarity(gt, p, point_tolerance_s))
                .fold(0.0, f64::max)
        })
        .sum();
    Ok(sum / gt_anchors.len() as f64)
}

/// Blend of coverage and correctness.
pub fn temporal_reward(r_cov: f64, r_cor: f64, alpha: f64) -> f64 {
    alpha * r_cov + (1.0 - alpha) * r_cor
}

/// Score one parsed output against its sample, producing the full breakdown.
pub fn total_reward(
    parsed: &ParsedOutput,
    sample: &Sample,
    cfg: &RewardConfig,
    mode: AccuracyMode,
    judge: Option<&dyn AnswerJudge>,
) -> Result<RewardBreakdown, Error> {
    cfg.validate()?;
    let r_fmt = format_reward(parsed);
    let r_acc = accuracy_reward(
        &parsed.chain.answer,
        &sample.reference_answer,
        &sample.question,
        mode,
        judge,
    )?;
    let r_cov = coverage_reward(&parsed.chain.steps);
    let gt = sample.reference_chain.all_anchors();
    let pred = parsed.chain.all_anchors();
    let r_cor = correctness_reward(&gt, &pred, cfg.point_tolerance_s)?;
    let r_temporal = temporal_reward(r_cov, r_cor, cfg.alpha);
    let total =
        cfg.lambda_fmt * r_fmt + cfg.lambda_acc * r_acc + cfg.lambda_temporal * r_temporal;
    Ok(RewardBreakdown {
        r_fmt,
        r_acc,
        r_cov,
        r_cor,
        r_temporal,
        total,
    })
}
