//! Run report data model and emission.
//!
//! The JSON form is the machine interface: schema-stable, deterministic
//! (fixed field order, sorted maps, no timestamps or hostnames), and safe to
//! diff byte-for-byte across identical runs. The Markdown form is for
//! humans: a headline table (accuracy, anchor rate, mean IoU, hit rate), a
//! per-task-category accuracy table, and an optional judge-agreement block.

use std::collections::BTreeMap;

use cot_core::model::TaskType;
use cot_core::reward::AccuracyMode;
use cot_core::{RewardBreakdown, RewardConfig};
use cot_core::sga::TaskBreakdown;
use serde::{Deserialize, Serialize};

use crate::config::EvalSettings;

/// Everything that influenced scoring, echoed so a report is reproducible
/// from its own header.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub reward: RewardConfig,
    pub accuracy_mode: AccuracyMode,
    pub hit_tau: f64,
    pub strict_iou_headline: bool,
    pub judge_mock: bool,
    pub judge_model: String,
}

impl ConfigSnapshot {
    pub fn new(reward: &RewardConfig, eval: &EvalSettings, judge_mock: bool, judge_model: &str) -> Self {
        ConfigSnapshot {
            reward: *reward,
            accuracy_mode: eval.accuracy_mode,
            hit_tau: eval.hit_tau,
            strict_iou_headline: eval.strict_iou,
            judge_mock,
            judge_model: judge_model.to_string(),
        }
    }
}

/// Bookkeeping for what was and wasn't scored.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct RunCounts {
    /// Valid samples loaded from the dataset.
    pub samples: usize,
    /// Samples that had a prediction and were evaluated.
    pub evaluated: usize,
    /// Samples without any prediction.
    pub missing_predictions: usize,
    /// Prediction lines whose sample_id matched nothing in the dataset.
    pub unmatched_predictions: usize,
    /// Dataset lines dropped during loading.
    pub invalid_dataset_lines: usize,
    /// Evaluated samples whose accuracy could not be scored (judge failure).
    pub accuracy_unscored: usize,
}

/// One evaluated sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleReport {
    pub sample_id: String,
    pub task_type: TaskType,
    pub format_ok: bool,
    /// `None` when the judge could not score the sample; never coerced to
    /// incorrect. The reward breakdown then carries `r_acc = 0` for this
    /// sample, and the accuracy aggregate excludes it.
    pub correct: Option<bool>,
    pub reward: RewardBreakdown,
    /// Fraction of this output's steps that cite an anchor.
    pub anchor_coverage: f64,
    /// Mixed point/span alignment score against the reference anchors.
    pub grounding_score: f64,
    /// Strict span-IoU variant of the alignment score.
    pub grounding_score_strict: f64,
}

/// Aggregates over all evaluated samples. Every value here is recomputable
/// from `per_sample`; nothing is carried that the records cannot back up.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregates {
    /// Fraction correct over accuracy-scored samples; `None` when no sample
    /// could be scored.
    pub accuracy: Option<f64>,
    /// Mean per-output anchor coverage.
    pub anchor_rate: f64,
    /// Fraction of outputs with at least one anchored step.
    pub anchor_presence_rate: f64,
    /// Fraction of outputs that satisfied the output grammar.
    pub format_rate: f64,
    pub mean_iou: f64,
    pub mean_iou_strict: f64,
    /// Fraction of samples with grounding score strictly above `hit_tau`.
    pub hit_rate: f64,
    pub hit_rate_strict: f64,
    pub hit_tau: f64,
    pub mean_total_reward: f64,
    /// Accuracy split by task category; `None` when nothing was scored.
    pub task_accuracy: Option<TaskBreakdown>,
}

/// Inter-judge agreement over shared samples, present when at least two
/// verdict files were supplied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgreementReport {
    pub judges: Vec<String>,
    /// Samples covered by every judge (agreement is computed on these).
    pub samples: usize,
    pub pairwise_agreement: f64,
    pub fleiss_kappa: f64,
    /// Cohen's kappa of each judge against the designated reference judge.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohen_vs_reference: Option<CohenBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CohenBlock {
    pub reference: String,
    pub kappa: BTreeMap<String, f64>,
}

/// Full evaluation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub toolkit_version: String,
    pub config: ConfigSnapshot,
    pub counts: RunCounts,
    pub aggregates: Aggregates,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<AgreementReport>,
    /// External human-assessment scores passed through untouched when a
    /// scores file is supplied alongside the run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub human_assessment: Option<serde_json::Value>,
    pub per_sample: Vec<SampleReport>,
}

/// Serializes the report as pretty JSON with a trailing newline. Output is
/// byte-deterministic for identical runs.
pub fn to_json_bytes(report: &RunReport) -> crate::Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(report)?;
    buf.push(b'\n');
    Ok(buf)
}

fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

/// Renders the human-readable Markdown report.
pub fn to_markdown(report: &RunReport) -> String {
    let mut md = String::new();
    let a = &report.aggregates;
    md.push_str("# Evaluation report\n\n");
    md.push_str(&format!(
        "Toolkit {} — {} samples, {} evaluated, {} missing predictions, {} unmatched predictions, {} invalid dataset lines, {} accuracy-unscored.\n\n",
        report.toolkit_version,
        report.counts.samples,
        report.counts.evaluated,
        report.counts.missing_predictions,
        report.counts.unmatched_predictions,
        report.counts.invalid_dataset_lines,
        report.counts.accuracy_unscored,
    ));

    let (miou, hit, variant) = if report.config.strict_iou_headline {
        (a.mean_iou_strict, a.hit_rate_strict, " (strict span IoU)")
    } else {
        (a.mean_iou, a.hit_rate, "")
    };
    md.push_str(&format!("## Headline{variant}\n\n"));
    md.push_str(&format!("| Acc. (%) | Anchor (%) | mIoU | Hit@{:.2} (%) |\n", a.hit_tau));
    md.push_str("|---:|---:|---:|---:|\n");
    let acc_cell = match a.accuracy {
        Some(acc) => pct(acc),
        None => "n/a".to_string(),
    };
    md.push_str(&format!(
        "| {} | {} | {:.4} | {} |\n\n",
        acc_cell,
        pct(a.anchor_rate),
        miou,
        pct(hit)
    ));

    md.push_str("Secondary statistics: ");
    md.push_str(&format!(
        "format rate {}%, anchor presence {}%, mIoU(strict) {:.4}, Hit@{:.2}(strict) {}%, mean reward {:.4}.\n\n",
        pct(a.format_rate),
        pct(a.anchor_presence_rate),
        a.mean_iou_strict,
        a.hit_tau,
        pct(a.hit_rate_strict),
        a.mean_total_reward,
    ));

    if let Some(tb) = &a.task_accuracy {
        md.push_str("## Accuracy by task category (%)\n\n");
        let mut header = String::from("|");
        let mut rule = String::from("|");
        let mut row = String::from("|");
        for (task, acc) in &tb.per_task {
            header.push_str(&format!(" {} |", task));
            rule.push_str("---:|");
            row.push_str(&format!(" {} |", pct(*acc)));
        }
        header.push_str(" Avg. | Micro |\n");
        rule.push_str("---:|---:|\n");
        row.push_str(&format!(" {} | {} |\n\n", pct(tb.macro_avg), pct(tb.micro_avg)));
        md.push_str(&header);
        md.push_str(&rule);
        md.push_str(&row);
    }

    if let Some(ag) = &report.agreement {
        md.push_str("## Judge agreement\n\n");
        md.push_str(&format!("- Judges: {}\n", ag.judges.join(", ")));
        md.push_str(&format!("- Shared samples: {}\n", ag.samples));
        md.push_str(&format!("- Average pairwise agreement: {}%\n", pct(ag.pairwise_agreement)));
        md.push_str(&format!("- Fleiss' kappa: {:.4}\n", ag.fleiss_kappa));
        if let Some(cb) = &ag.cohen_vs_reference {
            for (judge, k) in &cb.kappa {
                md.push_str(&format!("- Cohen's kappa vs {}: {} = {:.4}\n", cb.reference, judge, k));
            }
        }
        md.push('\n');
    }

    md
}
