use thiserror::Error;

/// Crate-wide error type.
///
/// Most of the library is total (the parser in particular never fails), so
/// errors concentrate around numeric preconditions, degenerate statistics,
/// and the I/O edges (frames, adapters).
#[derive(Debug, Error)]
pub enum Error {
    /// A timestamp or duration was NaN/infinite where a finite value is required.
    #[error("non-finite {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },

    /// A timestamp was negative where only non-negative seconds make sense.
    #[error("negative timestamp: {0}")]
    NegativeTimestamp(f64),

    /// Duration must be strictly positive to anchor anything inside it.
    #[error("duration must be > 0, got {0}")]
    NonPositiveDuration(f64),

    /// A sample violated a structural invariant (see message for which).
    #[error("invalid sample {sample_id}: {reason}")]
    InvalidSample { sample_id: String, reason: String },

    /// Reward weights / alpha / tolerance out of range.
    #[error("invalid reward config: {0}")]
    InvalidRewardConfig(String),

    /// Accuracy was requested in judge mode but no judge was supplied.
    #[error("external judge mode requires a judge implementation")]
    MissingJudge,

    /// The judge could not be reached or returned garbage; the sample stays
    /// unscored rather than being counted incorrect.
    #[error("judge transport failure: {0}")]
    JudgeTransport(String),

    /// Correctness is undefined without ground-truth anchors.
    #[error("reference chain has no anchors; correctness reward undefined")]
    EmptyGroundTruth,

    /// Group-relative advantages need at least two rollouts.
    #[error("group size must be >= 2, got {0}")]
    GroupTooSmall(usize),

    /// Catch-all for out-of-range scalar arguments (epsilon, fps, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A reward entering advantage normalization must be finite.
    #[error("non-finite reward at index {index}: {value}")]
    NonFiniteReward { index: usize, value: f64 },

    /// A metric over an empty collection has no defined value.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Paired inputs (e.g. two judges' verdicts) must align one-to-one.
    #[error("length mismatch in {what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    /// Agreement statistics with zero expected disagreement are undefined
    /// unless observed agreement is also perfect.
    #[error("degenerate agreement: expected agreement is 1 but observed is {observed}")]
    DegenerateAgreement { observed: f64 },

    /// Rater count table rows must be consistent.
    #[error("invalid rating matrix: {0}")]
    InvalidRatingMatrix(String),

    /// Planner / sampler configuration out of range.
    #[error("invalid plan config: {0}")]
    InvalidPlanConfig(String),

    /// A model or frame adapter failed; message carries the adapter's story.
    #[error("adapter failure: {0}")]
    Adapter(String),

    /// The frame is too small to hold the requested overlay.
    #[error("frame {frame_w}x{frame_h} too small for overlay {need_w}x{need_h} at margin {margin}")]
    FrameTooSmall {
        frame_w: u32,
        frame_h: u32,
        need_w: u32,
        need_h: u32,
        margin: u32,
    },

    /// PPM data that is not a P6 image we can read.
    #[error("malformed pixmap: {0}")]
    MalformedPixmap(String),

    /// Explicit timestamp text (CLI input, not free text) that does not read
    /// as `mm:ss` or `h:mm:ss`.
    #[error("cannot parse {0:?} as mm:ss or h:mm:ss")]
    BadTimestamp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
