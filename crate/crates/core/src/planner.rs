//! Anchor-conditioned sampling plans and the observe/infer loop.
//!
//! Instead of scanning a long video globally, each anchored reasoning step
//! spends a small, fixed frame budget around its own anchor: a point anchor
//! gets one clip of `L` frames at a fixed stride centered on it; a span gets
//! `J` such clips with centers spread uniformly inside the span. The loop
//! then shows the retrieved frames to the model step by step, letting it
//! revise anchors (or answer early), and finally asks for an answer
//! conditioned on the revised chain.

use std::cell::Cell;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{normalize_anchor, ChainOfTime, ReasoningStep, RewardConfig, Sample, TimeAnchor};
use crate::parser::parse_output;
use crate::sga::sample_grounding_score;

/// Knobs for local clip sampling. `L` (frames per clip) and the stride
/// define the window around a point anchor — there is no independent window
/// parameter; its width is `stride_s * (L - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    /// Frames per clip (the `L` in the plan shape).
    pub frames_per_clip: usize,
    /// Spacing between consecutive frames of a clip, in seconds.
    pub stride_s: f64,
    /// Clips sampled inside a span anchor (the `J` in the plan shape).
    pub clips_per_span: usize,
    /// Upper bound on verification turns in the observe/infer loop.
    pub max_turns: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            frames_per_clip: 8,
            stride_s: 2.0,
            clips_per_span: 3,
            max_turns: 8,
        }
    }
}

impl PlannerConfig {
    /// Total window width a point-anchor clip covers before clamping.
    pub fn window_s(&self) -> f64 {
        self.stride_s * (self.frames_per_clip.saturating_sub(1)) as f64
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.frames_per_clip < 1 {
            return Err(Error::InvalidPlanConfig("frames_per_clip must be >= 1".into()));
        }
        if self.clips_per_span < 1 {
            return Err(Error::InvalidPlanConfig("clips_per_span must be >= 1".into()));
        }
        if !self.stride_s.is_finite() || self.stride_s <= 0.0 {
            return Err(Error::InvalidPlanConfig(format!(
                "stride_s must be > 0, got {}",
                self.stride_s
            )));
        }
        if self.max_turns < 1 {
            return Err(Error::InvalidPlanConfig("max_turns must be >= 1".into()));
        }
        Ok(())
    }
}

/// The frames to fetch for one anchor: clips of timestamps, sorted by
/// center, each clip ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub anchor: TimeAnchor,
    pub clips: Vec<Vec<f64>>,
}

impl SamplingPlan {
    /// Total number of frame timestamps across all clips.
    pub fn frame_count(&self) -> usize {
        self.clips.iter().map(Vec::len).sum()
    }

    /// All timestamps flattened in plan order.
    pub fn timestamps(&self) -> Vec<f64> {
        self.clips.iter().flatten().copied().collect()
    }
}

/// One clip centered at `center`: `L` frames spaced by the stride, clamped
/// into the video, duplicates collapsed after clamping.
fn clip_around(center: f64, cfg: &PlannerConfig, duration_s: f64) -> Vec<f64> {
    let l = cfg.frames_per_clip;
    let half = (l as f64 - 1.0) / 2.0;
    let mut frames: Vec<f64> = (0..l)
        .map(|i| (center + (i as f64 - half) * cfg.stride_s).clamp(0.0, duration_s))
        .collect();
    frames.dedup();
    frames
}

/// Build the sampling plan for one normalized anchor. Total growth is
/// bounded by construction: one clip for a point, `J` clips for a span,
/// never more than `J * L` frames.
pub fn plan_for_anchor(anchor: &TimeAnchor, cfg: &PlannerConfig, duration_s: f64) -> SamplingPlan {
    let duration = if duration_s.is_finite() && duration_s > 0.0 {
        duration_s
    } else {
        f64::MAX
    };
    let clips = match anchor {
        TimeAnchor::Point(p) => vec![clip_around(*p, cfg, duration)],
        TimeAnchor::Span { start_s, end_s } => {
            let len = end_s - start_s;
            let j = cfg.clips_per_span;
            (0..j)
                .map(|idx| {
                    let center = start_s + (idx as f64 + 0.5) * len / j as f64;
                    clip_around(center, cfg, duration)
                })
                .collect()
        }
    };
    SamplingPlan {
        anchor: *anchor,
        clips,
    }
}

/// Fetches frames for requested timestamps, returning opaque references
/// (file paths, handles). Implementations must tolerate concurrent calls.
pub trait FrameRetriever {
    fn fetch(&self, video_reference: &str, timestamps: &[f64]) -> Result<Vec<String>, Error>;
}

/// The model side of the loop: produce an initial chain, verify single
/// steps against retrieved frames, and give a final answer for the revised
/// chain.
pub trait ChainModel {
    fn generate_chain(&self, video_reference: &str, question: &str) -> Result<String, Error>;
    fn verify_step(
        &self,
        question: &str,
        step_text: &str,
        anchor: &TimeAnchor,
        frames: &[String],
    ) -> Result<StepRevision, Error>;
    fn final_answer(&self, question: &str, chain: &ChainOfTime) -> Result<String, Error>;
}

/// What a verification turn may change: the step's text, its anchors, and
/// optionally an early final answer that stops the loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRevision {
    pub text: String,
    pub anchors: Vec<TimeAnchor>,
    pub early_answer: Option<String>,
}

/// Record of one verification turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub turn: usize,
    /// Index of the verified step within the working chain.
    pub step_index: usize,
    pub plan: SamplingPlan,
    /// Frame references the retriever returned.
    pub frames: Vec<String>,
    pub revised_text: String,
    pub revised_anchors: Vec<TimeAnchor>,
    pub early_answer: Option<String>,
}

/// Result of a completed observe/infer loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtioOutcome {
    pub initial_chain: ChainOfTime,
    pub refined_chain: ChainOfTime,
    pub answer: String,
    pub trace: Vec<TurnRecord>,
    /// Grounding score of the initial/refined chain against the reference,
    /// when the sample has reference anchors.
    pub initial_grounding: Option<f64>,
    pub refined_grounding: Option<f64>,
}

/// Loop failure carrying everything salvaged before the abort.
#[derive(Debug, thiserror::Error)]
#[error("observe/infer loop aborted: {source}")]
pub struct LoopAbort {
    pub source: Error,
    pub initial_chain: Option<ChainOfTime>,
    pub partial_chain: Option<ChainOfTime>,
    pub trace: Vec<TurnRecord>,
}

/// Run the anchor/observe/infer loop for one sample.
///
/// Turn 0 asks the model for an initial chain. Each anchored step (in
/// order, up to `max_turns` of them) gets a sampling plan built from its
/// first anchor, the planned frames are retrieved, and the model's revision
/// replaces the step — revised anchors are re-normalized because adapters
/// are untrusted. Unanchored steps are skipped (nothing to retrieve). An
/// early answer ends the loop; otherwise the final answer is requested once
/// after the last turn. Any adapter failure aborts with the partial trace
/// attached.
pub fn observe_infer(
    sample: &Sample,
    model: &dyn ChainModel,
    retriever: &dyn FrameRetriever,
    cfg: &PlannerConfig,
    reward_cfg: &RewardConfig,
) -> Result<AtioOutcome, Box<LoopAbort>> {
    let abort = |source: Error,
                 initial: Option<ChainOfTime>,
                 partial: Option<ChainOfTime>,
                 trace: Vec<TurnRecord>| {
        Box::new(LoopAbort {
            source,
            initial_chain: initial,
            partial_chain: partial,
            trace,
        })
    };
    if let Err(e) = cfg.validate() {
        return Err(abort(e, None, None, Vec::new()));
    }

    let raw = model
        .generate_chain(&sample.video_id, &sample.question)
        .map_err(|e| abort(e, None, None, Vec::new()))?;
    let initial_chain = parse_output(&raw, sample.duration_s).chain;

    let mut working = initial_chain.clone();
    let mut trace: Vec<TurnRecord> = Vec::new();
    let mut early_answer: Option<String> = None;
    let mut turn = 0usize;

    for step_index in 0..working.steps.len() {
        if turn >= cfg.max_turns || early_answer.is_some() {
            break;
        }
        let Some(anchor) = working.steps[step_index].anchors.first().copied() else {
            continue;
        };
        turn += 1;
        let plan = plan_for_anchor(&anchor, cfg, sample.duration_s);
        let timestamps = plan.timestamps();
        let frames = retriever
            .fetch(&sample.video_id, &timestamps)
            .map_err(|e| {
                abort(e, Some(initial_chain.clone()), Some(working.clone()), trace.clone())
            })?;
        let revision = model
            .verify_step(
                &sample.question,
                &working.steps[step_index].text,
                &anchor,
                &frames,
            )
            .map_err(|e| {
                abort(e, Some(initial_chain.clone()), Some(working.clone()), trace.clone())
            })?;
        let revised_anchors: Vec<TimeAnchor> = revision
            .anchors
            .iter()
            .filter_map(|a| {
                normalize_anchor(a.start_s(), Some(a.end_s()), sample.duration_s).ok()
            })
            .collect();
        working.steps[step_index] = ReasoningStep {
            text: revision.text.clone(),
            anchors: revised_anchors.clone(),
        };
        trace.push(TurnRecord {
            turn,
            step_index,
            plan,
            frames,
            revised_text: revision.text,
            revised_anchors,
            early_answer: revision.early_answer.clone(),
        });
        early_answer = revision.early_answer;
    }

    let answer = match early_answer {
        Some(a) => a,
        None => model
            .final_answer(&sample.question, &working)
            .map_err(|e| {
                abort(e, Some(initial_chain.clone()), Some(working.clone()), trace.clone())
            })?,
    };
    working.answer = answer.clone();

    let reference = &sample.reference_chain;
    let (initial_grounding, refined_grounding) = if reference.all_anchors().is_empty() {
        (None, None)
    } else {
        (
            sample_grounding_score(&initial_chain, reference, reward_cfg.point_tolerance_s).ok(),
            sample_grounding_score(&working, reference, reward_cfg.point_tolerance_s).ok(),
        )
    };

    Ok(AtioOutcome {
        initial_chain,
        refined_chain: working,
        answer,
        trace,
        initial_grounding,
        refined_grounding,
    })
}

/// Directory-of-images retriever: maps each requested timestamp to the
/// nearest stored frame file. Frame files are named by frame index
/// (`000042.ppm` → index 42) and a fixed fps converts indices to seconds.
/// This is the test/demo default; real pipelines would decode video.
#[derive(Debug, Clone)]
pub struct DirRetriever {
    frames: Vec<(f64, PathBuf)>,
}

impl DirRetriever {
    /// Scan `dir` for files whose stem parses as a frame index. Files that
    /// don't are ignored.
    pub fn new(dir: impl Into<PathBuf>, fps: f64) -> Result<Self, Error> {
        let dir = dir.into();
        if !fps.is_finite() || fps <= 0.0 {
            return Err(Error::InvalidArgument(format!("fps must be > 0, got {fps}")));
        }
        let mut frames = Vec::new();
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            if let Ok(index) = stem.parse::<u64>() {
                frames.push((index as f64 / fps, path));
            }
        }
        frames.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(DirRetriever { frames })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

impl FrameRetriever for DirRetriever {
    fn fetch(&self, _video: &str, timestamps: &[f64]) -> Result<Vec<String>, Error> {
        if self.frames.is_empty() {
            return Err(Error::Adapter("frame directory holds no indexed frames".into()));
        }
        Ok(timestamps
            .iter()
            .map(|&t| {
                let (_, path) = self
                    .frames
                    .iter()
                    .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
                    .unwrap();
                path.display().to_string()
            })
            .collect())
    }
}

/// How a scripted model revises each verified step, in turn order.
#[derive(Debug, Clone)]
pub enum RevisionRule {
    /// Return the step unchanged.
    Identity,
    /// Shift every anchor by a fixed offset in seconds.
    Shift(f64),
    /// Snap turn `k` to `targets[k % targets.len()]`.
    SnapTo(Vec<TimeAnchor>),
}

/// Deterministic scripted model for tests and demo runs.
#[derive(Debug)]
pub struct ScriptedChainModel {
    pub initial_raw: String,
    pub rule: RevisionRule,
    pub answer: String,
    /// Emit an early answer on this 1-based turn.
    pub early_answer_at_turn: Option<usize>,
    turns_seen: Cell<usize>,
}

impl ScriptedChainModel {
    pub fn new(initial_raw: impl Into<String>, rule: RevisionRule, answer: impl Into<String>) -> Self {
        ScriptedChainModel {
            initial_raw: initial_raw.into(),
            rule,
            answer: answer.into(),
            early_answer_at_turn: None,
            turns_seen: Cell::new(0),
        }
    }
}

impl ChainModel for ScriptedChainModel {
    fn generate_chain(&self, _video: &str, _question: &str) -> Result<String, Error> {
        Ok(self.initial_raw.clone())
    }

    fn verify_step(
        &self,
        _question: &str,
        step_text: &str,
        anchor: &TimeAnchor,
        _frames: &[String],
    ) -> Result<StepRevision, Error> {
        let k = self.turns_seen.get();
        self.turns_seen.set(k + 1);
        let anchors = match &self.rule {
            RevisionRule::Identity => vec![*anchor],
            RevisionRule::Shift(d) => vec![match anchor {
                TimeAnchor::Point(p) => TimeAnchor::Point(p + d),
                TimeAnchor::Span { start_s, end_s } => TimeAnchor::Span {
                    start_s: start_s + d,
                    end_s: end_s + d,
                },
            }],
            RevisionRule::SnapTo(targets) => vec![targets[k % targets.len()]],
        };
        let early_answer = self
            .early_answer_at_turn
            .filter(|&t| t == k + 1)
            .map(|_| self.answer.clone());
        Ok(StepRevision {
            text: step_text.to_string(),
            anchors,
            early_answer,
        })
    }

    fn final_answer(&self, _question: &str, _chain: &ChainOfTime) -> Result<String, Error> {
        Ok(self.answer.clone())
    }
}
