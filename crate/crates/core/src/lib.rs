//! Chain-of-time reasoning toolkit.
//!
//! A "chain of time" is a reasoning trace over a long video in which every
//! step cites an explicit time anchor (a timestamp like `02:15` or a span
//! like `02:18-02:21`). This crate provides the shared data model plus the
//! machinery built on top of it:
//!
//! - [`model`]: anchors, steps, chains, samples and the reward configuration
//! - [`parser`]: extraction of chains (steps, anchors, answer) from raw model text
//! - [`reward`]: format / accuracy / temporal-grounding rewards
//! - [`grpo`]: group-relative advantage computation for policy optimization
//! - [`sga`]: step-grounded accuracy metrics and inter-rater agreement
//! - [`planner`]: anchor-conditioned clip sampling and the observe/infer loop
//! - [`overlay`]: timestamp overlays burned into raw RGB frames
//!
//! Everything here is plain data plus pure functions; I/O stays at the edges
//! (PPM frames in [`overlay`], JSONL handled by the CLI harness).

pub mod error;
pub mod grpo;
pub mod model;
pub mod overlay;
pub mod parser;
pub mod planner;
pub mod reward;
pub mod sga;

pub use error::Error;
pub use model::{
    ChainOfTime, JudgeVerdict, ReasoningStep, RewardBreakdown, RewardConfig, Sample, Sport,
    TaskType, TimeAnchor,
};

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
