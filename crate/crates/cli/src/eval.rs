//! The per-sample scoring loop and aggregate assembly.
//!
//! Samples fan out across a small worker pool; each worker writes its result
//! into a slot indexed by dataset position, so the report is deterministic
//! regardless of scheduling. Aggregation is a single-threaded reduction over
//! those slots afterwards.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use cot_core::model::Sample;
use cot_core::parser::{parse_output, ParsedOutput};
use cot_core::reward::{
    accuracy_reward, coverage_reward, format_reward, temporal_reward, AccuracyMode, AnswerJudge,
};
use cot_core::{RewardBreakdown, RewardConfig};
use cot_core::sga;
use cot_core::Error as CoreError;
use cot_core::JudgeVerdict;

use crate::config::{EvalSettings, Settings};
use crate::dataset::{LoadedDataset, LoadedPredictions};
use crate::judge::JudgeClient;
use crate::report::{
    Aggregates, AgreementReport, CohenBlock, ConfigSnapshot, RunCounts, RunReport, SampleReport,
};
use crate::{CliError, Result};

/// Outcome of one sample's evaluation, kept alongside the parsed output so
/// aggregate statistics can reuse the parser's view.
struct Scored {
    report: SampleReport,
    parsed: ParsedOutput,
}

/// Scores one prediction against its sample.
///
/// A judge transport failure leaves `correct = None` (the sample is
/// unscored for accuracy, never counted incorrect); every temporal
/// component is still computed since none of them involve the judge.
fn score_sample(
    sample: &Sample,
    raw_text: &str,
    cfg: &RewardConfig,
    mode: AccuracyMode,
    judge: Option<&dyn AnswerJudge>,
) -> std::result::Result<Scored, CoreError> {
    let parsed = parse_output(raw_text, sample.duration_s);
    let r_fmt = format_reward(&parsed);
    let correct = match accuracy_reward(
        &parsed.chain.answer,
        &sample.reference_answer,
        &sample.question,
        mode,
        judge,
    ) {
        Ok(v) => Some(v == 1.0),
        Err(CoreError::JudgeTransport(_)) => None,
        Err(e) => return Err(e),
    };
    let r_acc = if correct == Some(true) { 1.0 } else { 0.0 };
    let r_cov = coverage_reward(&parsed.chain.steps);
    let gt = sample.reference_chain.all_anchors();
    let preds = parsed.chain.all_anchors();
    let r_cor = cot_core::reward::correctness_reward(&gt, &preds, cfg.point_tolerance_s)?;
    let r_temporal = temporal_reward(r_cov, r_cor, cfg.alpha);
    let total = cfg.lambda_fmt * r_fmt + cfg.lambda_acc * r_acc + cfg.lambda_temporal * r_temporal;
    let strict = sga::sample_grounding_score_strict(&parsed.chain, &sample.reference_chain)?;

    Ok(Scored {
        report: SampleReport {
            sample_id: sample.sample_id.clone(),
            task_type: sample.task_type,
            format_ok: parsed.format_ok,
            correct,
            reward: RewardBreakdown { r_fmt, r_acc, r_cov, r_cor, r_temporal, total },
            anchor_coverage: r_cov,
            grounding_score: r_cor,
            grounding_score_strict: strict,
        },
        parsed,
    })
}

/// Per-judge verdicts keyed by judge name, as loaded from verdict files.
pub type VerdictSets = BTreeMap<String, BTreeMap<String, JudgeVerdict>>;

/// Options beyond [`Settings`] that shape a run.
#[derive(Default)]
pub struct RunInputs {
    /// Verdict files for the agreement block (name -> per-sample verdicts).
    pub verdicts: VerdictSets,
    /// Judge name treated as the reference for Cohen's kappa; defaults to a
    /// judge literally named "human" when present.
    pub reference_judge: Option<String>,
    /// External human-assessment scores carried into the report untouched.
    pub human_assessment: Option<serde_json::Value>,
}

/// Evaluates a prediction set against a loaded dataset and assembles the
/// full report.
pub fn evaluate_run(
    dataset: &LoadedDataset,
    predictions: &LoadedPredictions,
    settings: &Settings,
    inputs: &RunInputs,
) -> Result<RunReport> {
    let judge_client = build_judge(settings)?;
    let judge_ref: Option<&(dyn AnswerJudge + Sync)> =
        judge_client.as_ref().map(|j| j as &(dyn AnswerJudge + Sync));

    let known: std::collections::BTreeSet<&str> =
        dataset.samples.iter().map(|s| s.sample_id.as_str()).collect();
    let unmatched = predictions
        .by_sample
        .keys()
        .filter(|id| !known.contains(id.as_str()))
        .count();

    // Pair each sample with its prediction, remembering dataset order.
    let work: Vec<(usize, &Sample, &str)> = dataset
        .samples
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            predictions
                .by_sample
                .get(&s.sample_id)
                .map(|raw| (i, s, raw.as_str()))
        })
        .collect();
    let missing = dataset.samples.len() - work.len();

    let scored = run_pool(&work, settings, judge_ref)?;

    let mut per_sample = Vec::with_capacity(scored.len());
    let mut parsed_outputs = Vec::with_capacity(scored.len());
    for s in scored {
        per_sample.push(s.report);
        parsed_outputs.push(s.parsed);
    }

    let accuracy_unscored = per_sample.iter().filter(|r| r.correct.is_none()).count();
    let counts = RunCounts {
        samples: dataset.samples.len(),
        evaluated: per_sample.len(),
        missing_predictions: missing,
        unmatched_predictions: unmatched,
        invalid_dataset_lines: dataset.invalid.len(),
        accuracy_unscored,
    };

    let aggregates = aggregate(&per_sample, &parsed_outputs, &settings.eval)?;
    let agreement = agreement_block(&inputs.verdicts, inputs.reference_judge.as_deref())?;

    let (judge_mock, judge_model) = match &judge_client {
        Some(j) => (j.is_mock(), j.judge_id().to_string()),
        None => (false, String::new()),
    };
    Ok(RunReport {
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigSnapshot::new(&settings.reward, &settings.eval, judge_mock, &judge_model),
        counts,
        aggregates,
        agreement,
        human_assessment: inputs.human_assessment.clone(),
        per_sample,
    })
}

/// Builds the judge client when the accuracy mode needs one.
fn build_judge(settings: &Settings) -> Result<Option<JudgeClient>> {
    if settings.eval.accuracy_mode != AccuracyMode::ExternalJudge {
        return Ok(None);
    }
    Ok(Some(JudgeClient::new(settings.judge.clone())?))
}

/// Fans the work out over `settings.eval.workers` threads. Results land in
/// dataset order; the first hard error (anything other than a judge
/// transport failure, which `score_sample` already absorbs) aborts the run.
fn run_pool(
    work: &[(usize, &Sample, &str)],
    settings: &Settings,
    judge: Option<&(dyn AnswerJudge + Sync)>,
) -> Result<Vec<Scored>> {
    let n = work.len();
    let slots: Mutex<Vec<Option<std::result::Result<Scored, CoreError>>>> =
        Mutex::new((0..n).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = settings.eval.workers.min(n.max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let (_, sample, raw) = work[i];
                let res = score_sample(
                    sample,
                    raw,
                    &settings.reward,
                    settings.eval.accuracy_mode,
                    judge.map(|j| j as &dyn AnswerJudge),
                );
                slots.lock().unwrap()[i] = Some(res);
            });
        }
    });

    let mut out = Vec::with_capacity(n);
    for (slot, (_, sample, _)) in slots.into_inner().unwrap().into_iter().zip(work) {
        let res = slot.expect("worker pool filled every slot");
        match res {
            Ok(s) => out.push(s),
            Err(e) => {
                return Err(CliError::Dataset(format!(
                    "sample {:?}: {e}",
                    sample.sample_id
                )))
            }
        }
    }
    Ok(out)
}

/// Reduces per-sample records to the aggregate block. Pure function of the
/// records (plus the parsed outputs for the anchor statistics), so the
/// report never claims anything its own rows cannot reproduce.
fn aggregate(
    per_sample: &[SampleReport],
    parsed_outputs: &[ParsedOutput],
    eval: &EvalSettings,
) -> Result<Aggregates> {
    if per_sample.is_empty() {
        return Ok(Aggregates {
            accuracy: None,
            anchor_rate: 0.0,
            anchor_presence_rate: 0.0,
            format_rate: 0.0,
            mean_iou: 0.0,
            mean_iou_strict: 0.0,
            hit_rate: 0.0,
            hit_rate_strict: 0.0,
            hit_tau: eval.hit_tau,
            mean_total_reward: 0.0,
            task_accuracy: None,
        });
    }
    let n = per_sample.len() as f64;
    let scored: Vec<&SampleReport> = per_sample.iter().filter(|r| r.correct.is_some()).collect();
    let accuracy = if scored.is_empty() {
        None
    } else {
        Some(
            scored.iter().filter(|r| r.correct == Some(true)).count() as f64 / scored.len() as f64,
        )
    };
    let grounding: Vec<f64> = per_sample.iter().map(|r| r.grounding_score).collect();
    let grounding_strict: Vec<f64> =
        per_sample.iter().map(|r| r.grounding_score_strict).collect();
    let task_pairs: Vec<_> = scored
        .iter()
        .map(|r| (r.task_type, r.correct == Some(true)))
        .collect();
    let task_accuracy = if task_pairs.is_empty() {
        None
    } else {
        Some(sga::task_breakdown(&task_pairs).map_err(CliError::Core)?)
    };
    Ok(Aggregates {
        accuracy,
        anchor_rate: sga::anchor_rate(parsed_outputs).map_err(CliError::Core)?,
        anchor_presence_rate: sga::anchor_presence_rate(parsed_outputs).map_err(CliError::Core)?,
        format_rate: per_sample.iter().map(|r| r.reward.r_fmt).sum::<f64>() / n,
        mean_iou: grounding.iter().sum::<f64>() / n,
        mean_iou_strict: grounding_strict.iter().sum::<f64>() / n,
        hit_rate: sga::hit_at(&grounding, eval.hit_tau).map_err(CliError::Core)?,
        hit_rate_strict: sga::hit_at(&grounding_strict, eval.hit_tau).map_err(CliError::Core)?,
        hit_tau: eval.hit_tau,
        mean_total_reward: per_sample.iter().map(|r| r.reward.total).sum::<f64>() / n,
        task_accuracy,
    })
}

/// Computes the agreement block over samples every judge covered.
/// Returns `None` with fewer than two judges.
pub fn agreement_block(
    verdicts: &VerdictSets,
    reference_judge: Option<&str>,
) -> Result<Option<AgreementReport>> {
    if verdicts.len() < 2 {
        return Ok(None);
    }
    // Intersection of covered sample ids, in sorted order.
    let mut shared: Vec<String> = verdicts
        .values()
        .next()
        .unwrap()
        .keys()
        .cloned()
        .collect();
    shared.retain(|id| verdicts.values().all(|m| m.contains_key(id)));
    if shared.is_empty() {
        return Err(CliError::Dataset(
            "verdict files share no sample ids; cannot compute agreement".to_string(),
        ));
    }

    let mut aligned: BTreeMap<String, Vec<bool>> = BTreeMap::new();
    for (name, by_sample) in verdicts {
        let vals = shared.iter().map(|id| by_sample[id].correct).collect();
        aligned.insert(name.clone(), vals);
    }

    let pairwise = sga::pairwise_agreement(&aligned).map_err(CliError::Core)?;
    // Fleiss' kappa wants a samples x categories count matrix; with binary
    // verdicts the categories are [incorrect, correct].
    let matrix: Vec<Vec<u32>> = (0..shared.len())
        .map(|i| {
            let correct = aligned.values().filter(|v| v[i]).count() as u32;
            let total = aligned.len() as u32;
            vec![total - correct, correct]
        })
        .collect();
    let fleiss = sga::fleiss_kappa(&matrix).map_err(CliError::Core)?;

    let reference = reference_judge
        .map(str::to_string)
        .or_else(|| aligned.contains_key("human").then(|| "human".to_string()));
    let cohen_vs_reference = match reference {
        Some(ref_name) => {
            let ref_vals = aligned.get(&ref_name).ok_or_else(|| {
                CliError::Dataset(format!("reference judge {ref_name:?} not among verdict files"))
            })?;
            let mut kappa = BTreeMap::new();
            for (name, vals) in &aligned {
                if name != &ref_name {
                    kappa.insert(
                        name.clone(),
                        sga::cohen_kappa(vals, ref_vals).map_err(CliError::Core)?,
                    );
                }
            }
            Some(CohenBlock { reference: ref_name, kappa })
        }
        None => None,
    };

    Ok(Some(AgreementReport {
        judges: aligned.keys().cloned().collect(),
        samples: shared.len(),
        pairwise_agreement: pairwise,
        fleiss_kappa: fleiss,
        cohen_vs_reference,
    }))
}

/// Scores a prediction set and returns just the per-sample reward
/// breakdowns, for the `reward` subcommand.
pub fn reward_lines(
    dataset: &LoadedDataset,
    predictions: &LoadedPredictions,
    settings: &Settings,
) -> Result<Vec<(String, RewardBreakdown, Option<bool>)>> {
    let judge_client = build_judge(settings)?;
    let judge_ref: Option<&dyn AnswerJudge> = judge_client.as_ref().map(|j| j as &dyn AnswerJudge);
    let mut out = Vec::new();
    for sample in &dataset.samples {
        let Some(raw) = predictions.by_sample.get(&sample.sample_id) else {
            continue;
        };
        let scored = score_sample(
            sample,
            raw,
            &settings.reward,
            settings.eval.accuracy_mode,
            judge_ref,
        )
        .map_err(|e| CliError::Dataset(format!("sample {:?}: {e}", sample.sample_id)))?;
        out.push((sample.sample_id.clone(), scored.report.reward, scored.report.correct));
    }
    Ok(out)
}
