//! Shared domain types: time anchors, reasoning steps, chains, samples, and
//! the reward configuration. Everything is an immutable value object; all
//! temporal arithmetic happens in seconds and `mm:ss` strings exist only at
//! the I/O boundary (see `parser::format_timestamp`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A temporal anchor inside a video: either a single timestamp or a span.
///
/// Internally a point is just a zero-width span, which keeps one code path
/// for all interval math; the enum split exists so that similarity scoring
/// and rendering can distinguish the two shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeAnchor {
    /// A single instant, in seconds from the start of the video.
    Point(f64),
    /// A closed interval `[start_s, end_s]` with `start_s <= end_s`.
    Span { start_s: f64, end_s: f64 },
}

impl TimeAnchor {
    pub fn start_s(&self) -> f64 {
        match *self {
            TimeAnchor::Point(p) => p,
            TimeAnchor::Span { start_s, .. } => start_s,
        }
    }

    pub fn end_s(&self) -> f64 {
        match *self {
            TimeAnchor::Point(p) => p,
            TimeAnchor::Span { end_s, .. } => end_s,
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, TimeAnchor::Point(_))
    }

    /// Width of the anchor in seconds (0 for points).
    pub fn len_s(&self) -> f64 {
        self.end_s() - self.start_s()
    }
}

/// Wire form of an anchor: always `{"start_s": .., "end_s": ..}` with
/// `start_s == end_s` for points.
#[derive(Serialize, Deserialize)]
struct AnchorWire {
    start_s: f64,
    end_s: f64,
}

impl Serialize for TimeAnchor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        AnchorWire {
            start_s: self.start_s(),
            end_s: self.end_s(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TimeAnchor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let w = AnchorWire::deserialize(deserializer)?;
        if w.start_s == w.end_s {
            Ok(TimeAnchor::Point(w.start_s))
        } else {
            Ok(TimeAnchor::Span {
                start_s: w.start_s,
                end_s: w.end_s,
            })
        }
    }
}

/// Clamp an anchor into `[0, duration_s]`, swapping reversed endpoints and
/// collapsing zero-width spans to points. This is the single normalization
/// choke point: the parser, the dataset loader and the planner all route
/// anchors through here, so downstream code can assume the invariants hold.
pub fn normalize_anchor(
    raw_start_s: f64,
    raw_end_s: Option<f64>,
    duration_s: f64,
) -> Result<TimeAnchor, Error> {
    if !duration_s.is_finite() {
        return Err(Error::NonFinite {
            what: "duration_s",
            value: duration_s,
        });
    }
    if duration_s <= 0.0 {
        return Err(Error::NonPositiveDuration(duration_s));
    }
    if !raw_start_s.is_finite() {
        return Err(Error::NonFinite {
            what: "anchor start",
            value: raw_start_s,
        });
    }
    let clamp = |v: f64| v.clamp(0.0, duration_s);
    match raw_end_s {
        None => Ok(TimeAnchor::Point(clamp(raw_start_s))),
        Some(raw_end) => {
            if !raw_end.is_finite() {
                return Err(Error::NonFinite {
                    what: "anchor end",
                    value: raw_end,
                });
            }
            let (lo, hi) = if raw_end < raw_start_s {
                (raw_end, raw_start_s)
            } else {
                (raw_start_s, raw_end)
            };
            let (lo, hi) = (clamp(lo), clamp(hi));
            if lo == hi {
                Ok(TimeAnchor::Point(lo))
            } else {
                Ok(TimeAnchor::Span {
                    start_s: lo,
                    end_s: hi,
                })
            }
        }
    }
}

/// One step of a reasoning chain: a statement plus the time anchors cited in
/// it. Reference chains carry exactly one anchor per step; parsed model
/// output may carry zero or more — the parser must not discard information.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasoningStep {
    pub text: String,
    #[serde(default)]
    pub anchors: Vec<TimeAnchor>,
}

impl ReasoningStep {
    pub fn new(text: impl Into<String>, anchors: Vec<TimeAnchor>) -> Self {
        ReasoningStep {
            text: text.into(),
            anchors,
        }
    }

    pub fn is_anchored(&self) -> bool {
        !self.anchors.is_empty()
    }
}

/// A full reasoning trajectory: ordered steps followed by a final answer.
/// Steps may be empty only for degenerate model outputs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChainOfTime {
    #[serde(default)]
    pub steps: Vec<ReasoningStep>,
    #[serde(default)]
    pub answer: String,
}

impl ChainOfTime {
    /// Steps that cite at least one anchor.
    pub fn anchored_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.is_anchored()).count()
    }

    /// All anchors in step order.
    pub fn all_anchors(&self) -> Vec<TimeAnchor> {
        self.steps
            .iter()
            .flat_map(|s| s.anchors.iter().copied())
            .collect()
    }
}

/// Sport category of a video.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sport {
    AmericanFootball,
    IceHockey,
    Soccer,
    Basketball,
    Volleyball,
}

impl Sport {
    pub const ALL: [Sport; 5] = [
        Sport::AmericanFootball,
        Sport::IceHockey,
        Sport::Soccer,
        Sport::Basketball,
        Sport::Volleyball,
    ];

    /// The lowercase wire name, e.g. `"ice_hockey"`.
    pub fn as_str(&self) -> &'static str {
        match self {
            Sport::AmericanFootball => "american_football",
            Sport::IceHockey => "ice_hockey",
            Sport::Soccer => "soccer",
            Sport::Basketball => "basketball",
            Sport::Volleyball => "volleyball",
        }
    }
}

impl fmt::Display for Sport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sport {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Sport::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown sport: {s:?}"))
    }
}

/// Question category a sample belongs to; evaluation reports break accuracy
/// down along this axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    Perception,
    Temporal,
    Tactical,
    Causal,
    Counterfactual,
}

impl TaskType {
    pub const ALL: [TaskType; 5] = [
        TaskType::Perception,
        TaskType::Temporal,
        TaskType::Tactical,
        TaskType::Causal,
        TaskType::Counterfactual,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TaskType::Perception => "perception",
            TaskType::Temporal => "temporal",
            TaskType::Tactical => "tactical",
            TaskType::Causal => "causal",
            TaskType::Counterfactual => "counterfactual",
        }
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskType::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown task type: {s:?}"))
    }
}

/// One benchmark sample: a question about a video plus the annotated
/// reference answer and reference chain. The video itself is referenced by
/// id only — no pixel data lives here.
///
/// Unknown JSON fields are kept around on read (`extra`) so that re-encoding
/// pipelines can tolerate sidecar metadata, but they are dropped on write.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub sample_id: String,
    pub video_id: String,
    pub duration_s: f64,
    pub sport: Sport,
    pub task_type: TaskType,
    pub question: String,
    pub reference_answer: String,
    pub reference_chain: ChainOfTime,
    #[serde(flatten, skip_serializing)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl Sample {
    /// Check the structural invariants that loading is supposed to
    /// establish: positive duration, a non-empty reference chain, exactly
    /// one in-range anchor per reference step, non-empty step text.
    pub fn validate(&self) -> Result<(), Error> {
        let fail = |reason: String| Error::InvalidSample {
            sample_id: self.sample_id.clone(),
            reason,
        };
        if self.sample_id.trim().is_empty() {
            return Err(Error::InvalidSample {
                sample_id: "<empty>".into(),
                reason: "empty sample_id".into(),
            });
        }
        if !self.duration_s.is_finite() || self.duration_s <= 0.0 {
            return Err(fail(format!("duration_s must be positive, got {}", self.duration_s)));
        }
        if self.reference_chain.steps.is_empty() {
            return Err(fail("reference chain has no steps".into()));
        }
        for (i, step) in self.reference_chain.steps.iter().enumerate() {
            if step.text.trim().is_empty() {
                return Err(fail(format!("step {} has empty text", i + 1)));
            }
            if step.anchors.len() != 1 {
                return Err(fail(format!(
                    "step {} has {} anchors, reference steps carry exactly one",
                    i + 1,
                    step.anchors.len()
                )));
            }
            let a = &step.anchors[0];
            if a.start_s() > a.end_s() {
                return Err(fail(format!("step {} anchor is reversed", i + 1)));
            }
            if a.start_s() < 0.0 || a.end_s() > self.duration_s {
                return Err(fail(format!(
                    "step {} anchor [{}, {}] outside [0, {}]",
                    i + 1,
                    a.start_s(),
                    a.end_s(),
                    self.duration_s
                )));
            }
        }
        Ok(())
    }
}

/// Weights and knobs for the composite reward.
///
/// `total = lambda_fmt * r_fmt + lambda_acc * r_acc + lambda_temporal * r_temporal`
/// with `r_temporal = alpha * coverage + (1 - alpha) * correctness`.
/// `point_tolerance_s` is the half-width of the credit window used when a
/// point anchor is compared against another anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardConfig {
    pub lambda_fmt: f64,
    pub lambda_acc: f64,
    pub lambda_temporal: f64,
    pub alpha: f64,
    pub point_tolerance_s: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            lambda_fmt: 0.5,
            lambda_acc: 1.0,
            lambda_temporal: 1.0,
            alpha: 0.5,
            point_tolerance_s: 10.0,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [
            ("lambda_fmt", self.lambda_fmt),
            ("lambda_acc", self.lambda_acc),
            ("lambda_temporal", self.lambda_temporal),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidRewardConfig(format!(
                    "{name} must be a non-negative finite number, got {v}"
                )));
            }
        }
        if !self.alpha.is_finite() || !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidRewardConfig(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        if !self.point_tolerance_s.is_finite() || self.point_tolerance_s <= 0.0 {
            return Err(Error::InvalidRewardConfig(format!(
                "point_tolerance_s must be > 0, got {}",
                self.point_tolerance_s
            )));
        }
        Ok(())
    }
}

/// Per-component reward values for one model output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    /// 1.0 if the output followed the required tag format, else 0.0.
    pub r_fmt: f64,
    pub r_acc: f64,
    /// Fraction of predicted steps that cite at least one anchor.
    pub r_cov: f64,
    /// Mean best-match similarity of ground-truth anchors against predictions.
    pub r_cor: f64,
    pub r_temporal: f64,
    pub total: f64,
}

/// One judge's binary decision on one sample's answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub sample_id: String,
    pub judge_id: String,
    pub correct: bool,
}
