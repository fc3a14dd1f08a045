//! Library half of the `cot` evaluation harness.
//!
//! The binary in `main.rs` is a thin argument-parsing shell; everything it
//! does goes through this crate so integration tests can drive the same code
//! paths directly. The split is:
//!
//! * [`config`] — layered configuration (flags over environment over TOML
//!   file over defaults) and the judge prompt template.
//! * [`dataset`] — JSONL ingestion for samples, predictions and verdicts,
//!   with per-line error reporting and anchor normalization warnings.
//! * [`judge`] — chat-completion judge client with retries, bounded
//!   concurrency and a deterministic mock mode.
//! * [`eval`] — the per-sample scoring loop and aggregate computation.
//! * [`report`] — report data model plus JSON/Markdown emission.
//! * [`stats`] — dataset composition statistics.
//! * [`adapters`] — an HTTP-backed model adapter for group rollouts.

pub mod adapters;
pub mod config;
pub mod dataset;
pub mod eval;
pub mod judge;
pub mod report;
pub mod stats;

use thiserror::Error;

/// Errors surfaced by harness-level operations (as opposed to scoring
/// errors, which come from `cot_core::Error`).
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cot_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("dataset error: {0}")]
    Dataset(String),
    #[error("judge transport error: {0}")]
    Judge(String),
}

pub type Result<T> = std::result::Result<T, CliError>;
