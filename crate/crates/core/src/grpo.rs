//! Group-relative advantage computation.
//!
//! For each sample we collect a group of G rollouts, score each with the
//! composite reward, and normalize within the group:
//! `A_i = (r_i - mean) / (std + epsilon)` with the population standard
//! deviation. The policy update consuming these advantages lives outside
//! this crate; this module is just the numeric core plus the rollout
//! collection plumbing.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::Sample;
use crate::parser::{parse_output, ParsedOutput};

/// Default number of rollouts per group.
pub const DEFAULT_GROUP_SIZE: usize = 8;

/// Default additive epsilon guarding zero-variance groups.
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Rewards for one sample's rollout group, in rollout (seed) order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardGroup {
    pub sample_id: String,
    pub rewards: Vec<f64>,
}

/// Normalize rewards within a group.
///
/// Uses the population standard deviation; a zero-variance group comes out
/// all-zero (the epsilon keeps the division defined) rather than erroring,
/// since RL loops must keep moving through degenerate groups.
pub fn group_advantages(rewards: &[f64], epsilon: f64) -> Result<Vec<f64>, Error> {
    if rewards.len() < 2 {
        return Err(Error::GroupTooSmall(rewards.len()));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    for (index, &value) in rewards.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFiniteReward { index, value });
        }
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    Ok(rewards.iter().map(|r| (r - mean) / (std + epsilon)).collect())
}

/// A generation backend: given a video reference, a question and a seed,
/// produce one raw rollout. Implementations include an HTTP client in the
/// CLI harness and [`ScriptedModel`] for deterministic tests.
pub trait ModelAdapter {
    fn generate(&self, video_reference: &str, question: &str, seed: u64) -> Result<String, Error>;
}

/// Deterministic mock adapter: rollout for seed `i` returns `outputs[i]`.
#[derive(Debug, Clone)]
pub struct ScriptedModel {
    pub outputs: Vec<String>,
}

impl ScriptedModel {
    pub fn new<S: Into<String>>(outputs: impl IntoIterator<Item = S>) -> Self {
        ScriptedModel {
            outputs: outputs.into_iter().map(Into::into).collect(),
        }
    }
}

impl ModelAdapter for ScriptedModel {
    fn generate(&self, _video: &str, _question: &str, seed: u64) -> Result<String, Error> {
        self.outputs
            .get(seed as usize)
            .cloned()
            .ok_or_else(|| Error::Adapter(format!("no scripted output for seed {seed}")))
    }
}

/// Collect one reward group for a sample: request `group_size` rollouts with
/// seeds `0..group_size`, parse each, and score each with `reward_fn`.
/// Rollout order is preserved; any adapter failure aborts the whole group.
pub fn collect_group<F>(
    sample: &Sample,
    model: &dyn ModelAdapter,
    group_size: usize,
    mut reward_fn: F,
) -> Result<(RewardGroup, Vec<ParsedOutput>), Error>
where
    F: FnMut(&ParsedOutput, &Sample) -> Result<f64, Error>,
{
    if group_size < 2 {
        return Err(Error::GroupTooSmall(group_size));
    }
    let mut rewards = Vec::with_capacity(group_size);
    let mut outputs = Vec::with_capacity(group_size);
    for seed in 0..group_size as u64 {
        let raw = model.generate(&sample.video_id, &sample.question, seed)?;
        let parsed = parse_output(&raw, sample.duration_s);
        rewards.push(reward_fn(&parsed, sample)?);
        outputs.push(parsed);
    }
    Ok((
        RewardGroup {
            sample_id: sample.sample_id.clone(),
            rewards,
        },
        outputs,
    ))
}
