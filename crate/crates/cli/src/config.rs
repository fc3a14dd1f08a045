//! Layered configuration resolution.
//!
//! Every tunable is resolved with the same precedence, highest first:
//!
//! 1. a command-line flag,
//! 2. a `COT_*` environment variable,
//! 3. the TOML config file (`--config`, else `$COT_CONFIG`, else `./cot.toml`
//!    if present),
//! 4. the built-in default.
//!
//! The judge prompt lives here (and in `config/default.toml`) so that prompt
//! edits never require touching scoring code.

use std::env;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cot_core::reward::AccuracyMode;
use cot_core::RewardConfig;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

/// Prompt sent to the external judge. `{question}`, `{reference}` and
/// `{prediction}` are replaced before the request goes out. The judge is
/// instructed to answer with a single token so the response parser can stay
/// trivial.
pub const DEFAULT_JUDGE_PROMPT: &str = "\
You are grading an answer to a question about a sports video.\n\
Question: {question}\n\
Reference answer: {reference}\n\
Candidate answer: {prediction}\n\
Reply with exactly one word: CORRECT if the candidate answer conveys the same \
meaning as the reference answer, otherwise INCORRECT. Do not explain.";

/// Environment variable that points at a config file when `--config` is not
/// given.
pub const ENV_CONFIG_PATH: &str = "COT_CONFIG";

/// Name of the config file picked up from the working directory when neither
/// `--config` nor `COT_CONFIG` is set.
pub const LOCAL_CONFIG_NAME: &str = "cot.toml";

/// Optional values as they appear in the TOML file. Every leaf is an
/// `Option` so that "absent from file" and "explicitly set" stay
/// distinguishable during layering.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub reward: RewardFileSection,
    pub eval: EvalFileSection,
    pub judge: JudgeFileSection,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardFileSection {
    pub lambda_fmt: Option<f64>,
    pub lambda_acc: Option<f64>,
    pub lambda_temporal: Option<f64>,
    pub alpha: Option<f64>,
    pub point_tolerance_s: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalFileSection {
    pub accuracy_mode: Option<String>,
    pub hit_tau: Option<f64>,
    pub strict_iou: Option<bool>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JudgeFileSection {
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub mock: Option<bool>,
    pub max_attempts: Option<u32>,
    pub backoff_initial_ms: Option<u64>,
    pub backoff_factor: Option<f64>,
    pub max_in_flight: Option<usize>,
    pub timeout_s: Option<u64>,
    pub prompt_template: Option<String>,
}

impl FileConfig {
    /// Loads a config file, or returns the empty config when `path` is
    /// `None` and no fallback file exists.
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let resolved: Option<PathBuf> = match path {
            Some(p) => Some(p.to_path_buf()),
            None => match env::var(ENV_CONFIG_PATH) {
                Ok(p) if !p.is_empty() => Some(PathBuf::from(p)),
                _ => {
                    let local = PathBuf::from(LOCAL_CONFIG_NAME);
                    local.exists().then_some(local)
                }
            },
        };
        let Some(p) = resolved else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(&p)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", p.display())))
    }
}

/// Effective judge settings after layering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgeSettings {
    pub endpoint: String,
    pub model: String,
    /// Environment variable read for the bearer token at request time; the
    /// token itself never appears in configs or reports.
    pub api_key_env: String,
    pub mock: bool,
    pub max_attempts: u32,
    pub backoff_initial_ms: u64,
    pub backoff_factor: f64,
    pub max_in_flight: usize,
    pub timeout_s: u64,
    #[serde(skip_serializing)]
    pub prompt_template: String,
}

impl Default for JudgeSettings {
    fn default() -> Self {
        JudgeSettings {
            endpoint: String::new(),
            model: "judge-model".to_string(),
            api_key_env: "COT_JUDGE_API_KEY".to_string(),
            mock: false,
            max_attempts: 3,
            backoff_initial_ms: 1000,
            backoff_factor: 2.0,
            max_in_flight: 4,
            timeout_s: 30,
            prompt_template: DEFAULT_JUDGE_PROMPT.to_string(),
        }
    }
}

/// Effective evaluation settings after layering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalSettings {
    pub accuracy_mode: AccuracyMode,
    pub hit_tau: f64,
    /// When true the Markdown headline table reports the strict span-IoU
    /// variant instead of the mixed point/span scheme. Both variants are
    /// always present in the JSON report.
    pub strict_iou: bool,
    pub workers: usize,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            accuracy_mode: AccuracyMode::ExactNormalized,
            hit_tau: 0.5,
            strict_iou: false,
            workers: 4,
        }
    }
}

/// Command-line overrides, `None` meaning "flag not given". The binary fills
/// this from clap; tests construct it directly.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub lambda_fmt: Option<f64>,
    pub lambda_acc: Option<f64>,
    pub lambda_temporal: Option<f64>,
    pub alpha: Option<f64>,
    pub point_tolerance_s: Option<f64>,
    pub accuracy_mode: Option<AccuracyMode>,
    pub hit_tau: Option<f64>,
    pub strict_iou: Option<bool>,
    pub workers: Option<usize>,
    pub judge_endpoint: Option<String>,
    pub judge_model: Option<String>,
    pub mock_judge: Option<bool>,
}

/// Resolves one value through the four layers. The environment variable, if
/// present and non-empty, must parse as `T`.
pub fn layered<T>(flag: Option<T>, env_key: &str, file: Option<T>, default: T) -> Result<T>
where
    T: FromStr,
    <T as FromStr>::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Ok(raw) = env::var(env_key) {
        if !raw.is_empty() {
            return raw
                .parse::<T>()
                .map_err(|e| CliError::Config(format!("bad {env_key}={raw}: {e}")));
        }
    }
    Ok(file.unwrap_or(default))
}

/// Boolean flavor of [`layered`]: accepts 1/0, true/false, yes/no, on/off in
/// the environment.
pub fn layered_bool(flag: Option<bool>, env_key: &str, file: Option<bool>, default: bool) -> Result<bool> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Ok(raw) = env::var(env_key) {
        let t = raw.trim().to_ascii_lowercase();
        if !t.is_empty() {
            return match t.as_str() {
                "1" | "true" | "yes" | "on" => Ok(true),
                "0" | "false" | "no" | "off" => Ok(false),
                _ => Err(CliError::Config(format!("bad {env_key}={raw}: expected a boolean"))),
            };
        }
    }
    Ok(file.unwrap_or(default))
}

/// Fully resolved settings for an evaluation run.
#[derive(Debug, Clone)]
pub struct Settings {
    pub reward: RewardConfig,
    pub eval: EvalSettings,
    pub judge: JudgeSettings,
}

/// Applies the precedence rules across all tunables.
pub fn resolve(overrides: &Overrides, file: &FileConfig) -> Result<Settings> {
    let rd = RewardConfig::default();
    let reward = RewardConfig {
        lambda_fmt: layered(overrides.lambda_fmt, "COT_LAMBDA_FMT", file.reward.lambda_fmt, rd.lambda_fmt)?,
        lambda_acc: layered(overrides.lambda_acc, "COT_LAMBDA_ACC", file.reward.lambda_acc, rd.lambda_acc)?,
        lambda_temporal: layered(
            overrides.lambda_temporal,
            "COT_LAMBDA_TEMPORAL",
            file.reward.lambda_temporal,
            rd.lambda_temporal,
        )?,
        alpha: layered(overrides.alpha, "COT_ALPHA", file.reward.alpha, rd.alpha)?,
        point_tolerance_s: layered(
            overrides.point_tolerance_s,
            "COT_POINT_TOLERANCE_S",
            file.reward.point_tolerance_s,
            rd.point_tolerance_s,
        )?,
    };
    reward.validate()?;

    let ed = EvalSettings::default();
    let file_mode = match &file.eval.accuracy_mode {
        Some(s) => Some(
            s.parse::<AccuracyMode>()
                .map_err(|e| CliError::Config(format!("bad accuracy_mode in config: {e}")))?,
        ),
        None => None,
    };
    let eval = EvalSettings {
        accuracy_mode: layered(
            overrides.accuracy_mode,
            "COT_ACCURACY_MODE",
            file_mode,
            ed.accuracy_mode,
        )?,
        hit_tau: layered(overrides.hit_tau, "COT_HIT_TAU", file.eval.hit_tau, ed.hit_tau)?,
        strict_iou: layered_bool(overrides.strict_iou, "COT_STRICT_IOU", file.eval.strict_iou, ed.strict_iou)?,
        workers: layered(overrides.workers, "COT_WORKERS", file.eval.workers, ed.workers)?,
    };
    if !(eval.hit_tau.is_finite() && (0.0..=1.0).contains(&eval.hit_tau)) {
        return Err(CliError::Config(format!("hit_tau must lie in [0, 1], got {}", eval.hit_tau)));
    }
    if eval.workers == 0 {
        return Err(CliError::Config("workers must be at least 1".to_string()));
    }

    let jd = JudgeSettings::default();
    let judge = JudgeSettings {
        endpoint: layered(
            overrides.judge_endpoint.clone(),
            "COT_JUDGE_ENDPOINT",
            file.judge.endpoint.clone(),
            jd.endpoint,
        )?,
        model: layered(
            overrides.judge_model.clone(),
            "COT_JUDGE_MODEL",
            file.judge.model.clone(),
            jd.model,
        )?,
        api_key_env: file.judge.api_key_env.clone().unwrap_or(jd.api_key_env),
        mock: layered_bool(overrides.mock_judge, "COT_JUDGE_MOCK", file.judge.mock, jd.mock)?,
        max_attempts: file.judge.max_attempts.unwrap_or(jd.max_attempts).max(1),
        backoff_initial_ms: file.judge.backoff_initial_ms.unwrap_or(jd.backoff_initial_ms),
        backoff_factor: file.judge.backoff_factor.unwrap_or(jd.backoff_factor),
        max_in_flight: file.judge.max_in_flight.unwrap_or(jd.max_in_flight).max(1),
        timeout_s: file.judge.timeout_s.unwrap_or(jd.timeout_s),
        prompt_template: file.judge.prompt_template.clone().unwrap_or(jd.prompt_template),
    };

    Ok(Settings { reward, eval, judge })
}
