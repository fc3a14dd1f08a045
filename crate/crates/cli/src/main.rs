//! `cot` — command-line harness for chain-of-time evaluation.
//!
//! Exit codes: 0 on success, 1 on fatal input/config errors, 2 when the run
//! finished but some samples could not be scored (partial result).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cot_core::grpo;
use cot_core::model::{ChainOfTime, Sample, TimeAnchor};
use cot_core::overlay::{self, OverlayConfig};
use cot_core::parser::{extract_anchors, render_tagged};
use cot_core::planner::{
    observe_infer, plan_for_anchor, DirRetriever, PlannerConfig, RevisionRule, ScriptedChainModel,
};
use cot_core::reward::AccuracyMode;

use cot_cli::config::{resolve, FileConfig, Overrides, Settings};
use cot_cli::dataset::{load_dataset, load_predictions, load_verdicts, LoadedDataset};
use cot_cli::eval::{evaluate_run, reward_lines, RunInputs, VerdictSets};
use cot_cli::report::{to_json_bytes, to_markdown};
use cot_cli::stats::{dataset_stats, stats_markdown};

#[derive(Parser)]
#[command(
    name = "cot",
    version,
    about = "Evaluation harness for time-anchored reasoning over long sports videos"
)]
struct Cli {
    /// TOML config file (default: $COT_CONFIG, then ./cot.toml if present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate predictions against a dataset and emit JSON/Markdown reports.
    Eval(EvalArgs),
    /// Print per-sample reward breakdowns as JSONL.
    Reward(RewardArgs),
    /// Convert rollout reward groups into normalized advantages.
    GroupAdv(GroupAdvArgs),
    /// Summarize dataset composition.
    Stats(StatsArgs),
    /// Burn timestamp labels into PPM frames and emit a frame-label manifest.
    Overlay(OverlayArgs),
    /// Print the frame-sampling plan for a single time anchor.
    Plan(PlanArgs),
    /// Run the anchor/observe/infer refinement loop with a scripted model.
    Atio(AtioArgs),
}

/// Scoring knobs shared by `eval` and `reward`. Every flag overrides the
/// matching `COT_*` environment variable, which overrides the config file.
#[derive(Args, Clone, Default)]
struct ScoringFlags {
    #[arg(long)]
    lambda_fmt: Option<f64>,
    #[arg(long)]
    lambda_acc: Option<f64>,
    #[arg(long)]
    lambda_temporal: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Point-anchor tolerance in seconds.
    #[arg(long)]
    point_tolerance_s: Option<f64>,
    /// exact_normalized | containment | external_judge
    #[arg(long, value_parser = parse_accuracy_mode)]
    accuracy_mode: Option<AccuracyMode>,
    #[arg(long)]
    hit_tau: Option<f64>,
    /// Use strict span IoU for the Markdown headline table.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    strict_iou: Option<bool>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    judge_endpoint: Option<String>,
    #[arg(long)]
    judge_model: Option<String>,
    /// Replace the external judge with the deterministic offline mock.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    mock_judge: Option<bool>,
}

fn parse_accuracy_mode(s: &str) -> Result<AccuracyMode, String> {
    s.parse()
}

impl ScoringFlags {
    fn overrides(&self) -> Overrides {
        Overrides {
            lambda_fmt: self.lambda_fmt,
            lambda_acc: self.lambda_acc,
            lambda_temporal: self.lambda_temporal,
            alpha: self.alpha,
            point_tolerance_s: self.point_tolerance_s,
            accuracy_mode: self.accuracy_mode,
            hit_tau: self.hit_tau,
            strict_iou: self.strict_iou,
            workers: self.workers,
            judge_endpoint: self.judge_endpoint.clone(),
            judge_model: self.judge_model.clone(),
            mock_judge: self.mock_judge,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    /// Write the JSON report here.
    #[arg(long)]
    report_json: Option<PathBuf>,
    /// Write the Markdown report here (default: stdout).
    #[arg(long)]
    report_md: Option<PathBuf>,
    /// Verdict files for the judge-agreement block, as NAME=PATH. Repeatable;
    /// at least two are needed for the block to appear.
    #[arg(long = "verdicts", value_name = "NAME=PATH")]
    verdicts: Vec<String>,
    /// Judge name used as the Cohen's-kappa reference (default: "human" if
    /// present among --verdicts).
    #[arg(long)]
    reference_judge: Option<String>,
    /// JSON file of external human-assessment scores, carried into the
    /// report untouched.
    #[arg(long)]
    human_scores: Option<PathBuf>,
    #[command(flatten)]
    scoring: ScoringFlags,
}

#[derive(Args)]
struct RewardArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    /// Output JSONL path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    scoring: ScoringFlags,
}

#[derive(Args)]
struct GroupAdvArgs {
    /// JSONL of reward groups: {"sample_id": ..., "rewards": [...]}.
    #[arg(long)]
    groups: PathBuf,
    #[arg(long, default_value_t = grpo::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Output JSONL path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// markdown | json
    #[arg(long, default_value = "markdown")]
    format: String,
}

#[derive(Args)]
struct OverlayArgs {
    /// Directory of input frames named by frame index (e.g. 000042.ppm).
    #[arg(long)]
    frames_dir: Option<PathBuf>,
    #[arg(long)]
    fps: f64,
    /// Output directory for labeled frames.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Video duration in seconds; required when no frames directory is
    /// given (manifest-only mode), otherwise derived from the frames.
    #[arg(long)]
    duration: Option<f64>,
    /// Glyph scale; 0 picks one from the frame height.
    #[arg(long, default_value_t = 1)]
    scale: u32,
    #[arg(long, default_value_t = 4)]
    margin: u32,
    /// Label color as R,G,B.
    #[arg(long, value_parser = parse_rgb, default_value = "255,255,255")]
    fg: [u8; 3],
    /// Optional opaque box color behind the label, as R,G,B.
    #[arg(long, value_parser = parse_rgb)]
    background: Option<[u8; 3]>,
    /// Manifest JSONL path (default: <out>/manifest.jsonl, or stdout in
    /// manifest-only mode).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn parse_rgb(s: &str) -> Result<[u8; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected R,G,B".to_string());
    }
    let mut rgb = [0u8; 3];
    for (slot, part) in rgb.iter_mut().zip(parts) {
        *slot = part.trim().parse().map_err(|e| format!("bad channel {part:?}: {e}"))?;
    }
    Ok(rgb)
}

#[derive(Args)]
struct PlanArgs {
    /// Anchor as mm:ss, h:mm:ss, or a range like "01:00-01:30".
    #[arg(long)]
    anchor: String,
    #[arg(long)]
    duration: f64,
    #[arg(long, default_value_t = 8)]
    frames_per_clip: usize,
    #[arg(long, default_value_t = 2.0)]
    stride_s: f64,
    #[arg(long, default_value_t = 3)]
    clips_per_span: usize,
}

#[derive(Args)]
struct AtioArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Sample to run (default: first in the dataset).
    #[arg(long)]
    sample_id: Option<String>,
    /// Directory of frames named by frame index; consulted by the retriever.
    #[arg(long)]
    frames_dir: PathBuf,
    #[arg(long)]
    fps: f64,
    /// Scripted revision behavior: identity | shift:<seconds> | snap
    /// (snap repairs each verified step to its reference anchor).
    #[arg(long, default_value = "identity")]
    revision: String,
    /// Build the initial chain by shifting every reference anchor by this
    /// many seconds, to give the loop something to repair.
    #[arg(long, default_value_t = 0.0)]
    initial_shift: f64,
    #[arg(long, default_value_t = 8)]
    frames_per_clip: usize,
    #[arg(long, default_value_t = 2.0)]
    stride_s: f64,
    #[arg(long, default_value_t = 3)]
    clips_per_span: usize,
    #[arg(long, default_value_t = 8)]
    max_turns: usize,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Eval(args) => cmd_eval(cli.config.as_deref(), args),
        Command::Reward(args) => cmd_reward(cli.config.as_deref(), args),
        Command::GroupAdv(args) => cmd_group_adv(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Overlay(args) => cmd_overlay(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Atio(args) => cmd_atio(args),
    }
}

fn load_settings(config: Option<&Path>, scoring: &ScoringFlags) -> anyhow::Result<Settings> {
    let file = FileConfig::load(config)?;
    Ok(resolve(&scoring.overrides(), &file)?)
}

fn warn_load_issues(path: &Path, loaded: &LoadedDataset) {
    for issue in &loaded.invalid {
        eprintln!("warning: {}: {issue} (line skipped)", path.display());
    }
    for issue in &loaded.warnings {
        eprintln!("warning: {}: {issue}", path.display());
    }
}

fn cmd_eval(config: Option<&Path>, args: EvalArgs) -> anyhow::Result<ExitCode> {
    let settings = load_settings(config, &args.scoring)?;
    let dataset = load_dataset(&args.dataset)?;
    warn_load_issues(&args.dataset, &dataset);
    let predictions = load_predictions(&args.predictions)?;
    for issue in &predictions.invalid {
        eprintln!("warning: {}: {issue}", args.predictions.display());
    }

    let mut verdicts = VerdictSets::new();
    for spec in &args.verdicts {
        let (name, path) = spec
            .split_once('=')
            .ok_or_else(|| anyhow::anyhow!("--verdicts wants NAME=PATH, got {spec:?}"))?;
        verdicts.insert(name.to_string(), load_verdicts(Path::new(path))?);
    }
    let human_assessment = match &args.human_scores {
        Some(p) => Some(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    let inputs = RunInputs {
        verdicts,
        reference_judge: args.reference_judge.clone(),
        human_assessment,
    };

    let report = evaluate_run(&dataset, &predictions, &settings, &inputs)?;

    if let Some(path) = &args.report_json {
        std::fs::write(path, to_json_bytes(&report)?)?;
    }
    let md = to_markdown(&report);
    match &args.report_md {
        Some(path) => std::fs::write(path, md)?,
        None => print!("{md}"),
    }

    let partial = report.counts.missing_predictions > 0
        || report.counts.unmatched_predictions > 0
        || report.counts.invalid_dataset_lines > 0
        || report.counts.accuracy_unscored > 0;
    Ok(if partial { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_reward(config: Option<&Path>, args: RewardArgs) -> anyhow::Result<ExitCode> {
    let settings = load_settings(config, &args.scoring)?;
    let dataset = load_dataset(&args.dataset)?;
    warn_load_issues(&args.dataset, &dataset);
    let predictions = load_predictions(&args.predictions)?;

    let rows = reward_lines(&dataset, &predictions, &settings)?;
    let mut out = String::new();
    for (sample_id, reward, correct) in &rows {
        let line = serde_json::json!({
            "sample_id": sample_id,
            "reward": reward,
            "correct": correct,
        });
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, out)?,
        None => print!("{out}"),
    }

    let partial = !dataset.invalid.is_empty() || rows.len() < dataset.samples.len();
    Ok(if partial { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_group_adv(args: GroupAdvArgs) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.groups)?;
    let mut out = String::new();
    let mut skipped = 0usize;
    let mut emitted = 0usize;
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<grpo::RewardGroup, _> = serde_json::from_str(line);
        let group = match parsed {
            Ok(g) => g,
            Err(e) => {
                eprintln!("warning: line {}: bad group: {e} (skipped)", idx + 1);
                skipped += 1;
                continue;
            }
        };
        match grpo::group_advantages(&group.rewards, args.epsilon) {
            Ok(advantages) => {
                let line = serde_json::json!({
                    "sample_id": group.sample_id,
                    "rewards": group.rewards,
                    "advantages": advantages,
                });
                out.push_str(&serde_json::to_string(&line)?);
                out.push('\n');
                emitted += 1;
            }
            Err(e) => {
                eprintln!("warning: line {}: {e} (skipped)", idx + 1);
                skipped += 1;
            }
        }
    }
    if emitted == 0 {
        anyhow::bail!("{}: no usable reward groups", args.groups.display());
    }
    match &args.out {
        Some(path) => std::fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(if skipped > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_stats(args: StatsArgs) -> anyhow::Result<ExitCode> {
    let dataset = load_dataset(&args.dataset)?;
    warn_load_issues(&args.dataset, &dataset);
    let stats = dataset_stats(&dataset.samples);
    match args.format.as_str() {
        "json" => {
            let mut buf = serde_json::to_vec_pretty(&stats)?;
            buf.push(b'\n');
            std::io::Write::write_all(&mut std::io::stdout(), &buf)?;
        }
        "markdown" => print!("{}", stats_markdown(&stats)),
        other => anyhow::bail!("unknown format {other:?} (want markdown or json)"),
    }
    Ok(if dataset.invalid.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_overlay(args: OverlayArgs) -> anyhow::Result<ExitCode> {
    if !(args.fps.is_finite() && args.fps > 0.0) {
        anyhow::bail!("--fps must be > 0");
    }
    match &args.frames_dir {
        Some(dir) => overlay_frames(&args, dir),
        None => {
            let duration = args
                .duration
                .ok_or_else(|| anyhow::anyhow!("manifest-only mode needs --duration"))?;
            let manifest = overlay::overlay_manifest(duration, args.fps)?;
            let mut out = String::new();
            for entry in &manifest {
                out.push_str(&serde_json::to_string(entry)?);
                out.push('\n');
            }
            match &args.manifest {
                Some(path) => std::fs::write(path, out)?,
                None => print!("{out}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn overlay_frames(args: &OverlayArgs, dir: &Path) -> anyhow::Result<ExitCode> {
    let out_dir = args
        .out
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("--out directory is required with --frames-dir"))?;
    std::fs::create_dir_all(out_dir)?;

    // Collect (index, path) for every PPM named by frame index.
    let mut frames: Vec<(u64, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        if path.extension().and_then(|e| e.to_str()) != Some("ppm") {
            continue;
        }
        if let Ok(index) = stem.parse::<u64>() {
            frames.push((index, path));
        }
    }
    if frames.is_empty() {
        anyhow::bail!("{}: no PPM frames named by index", dir.display());
    }
    frames.sort_by_key(|(i, _)| *i);

    let mut manifest_lines = String::new();
    let mut failures = 0usize;
    for (index, path) in &frames {
        let t = *index as f64 / args.fps;
        let frame = match overlay::read_ppm_file(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("warning: {}: {e} (skipped)", path.display());
                failures += 1;
                continue;
            }
        };
        let cfg = OverlayConfig {
            scale: if args.scale == 0 {
                OverlayConfig::auto_scale_for_height(frame.height)
            } else {
                args.scale
            },
            margin_px: args.margin,
            foreground: args.fg,
            background_box: args.background,
        };
        let labeled = match overlay::render_timestamp(&frame, t, &cfg) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("warning: {}: {e} (skipped)", path.display());
                failures += 1;
                continue;
            }
        };
        let out_path = out_dir.join(path.file_name().unwrap());
        overlay::write_ppm_file(&labeled, &out_path)?;
        let entry = overlay::ManifestEntry {
            frame_index: *index,
            label: cot_core::parser::format_timestamp(t)?,
        };
        manifest_lines.push_str(&serde_json::to_string(&entry)?);
        manifest_lines.push('\n');
    }
    if failures == frames.len() {
        anyhow::bail!("no frame could be labeled");
    }

    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| out_dir.join("manifest.jsonl"));
    std::fs::write(manifest_path, manifest_lines)?;
    Ok(if failures > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_plan(args: PlanArgs) -> anyhow::Result<ExitCode> {
    let anchors = extract_anchors(&args.anchor, args.duration);
    let anchor = anchors
        .first()
        .ok_or_else(|| anyhow::anyhow!("no time anchor recognized in {:?}", args.anchor))?;
    let cfg = PlannerConfig {
        frames_per_clip: args.frames_per_clip,
        stride_s: args.stride_s,
        clips_per_span: args.clips_per_span,
        ..PlannerConfig::default()
    };
    cfg.validate()?;
    let plan = plan_for_anchor(anchor, &cfg, args.duration);
    let mut buf = serde_json::to_vec_pretty(&plan)?;
    buf.push(b'\n');
    std::io::Write::write_all(&mut std::io::stdout(), &buf)?;
    Ok(ExitCode::SUCCESS)
}

/// Clones a chain with every anchor shifted by `delta` seconds and
/// re-normalized into the video.
fn shifted_chain(chain: &ChainOfTime, delta: f64, duration: f64) -> anyhow::Result<ChainOfTime> {
    let mut out = chain.clone();
    for step in &mut out.steps {
        for anchor in &mut step.anchors {
            *anchor = match *anchor {
                TimeAnchor::Point(p) => {
                    cot_core::model::normalize_anchor(p + delta, None, duration)?
                }
                TimeAnchor::Span { start_s, end_s } => {
                    cot_core::model::normalize_anchor(start_s + delta, Some(end_s + delta), duration)?
                }
            };
        }
    }
    Ok(out)
}

fn cmd_atio(args: AtioArgs) -> anyhow::Result<ExitCode> {
    let dataset = load_dataset(&args.dataset)?;
    warn_load_issues(&args.dataset, &dataset);
    let sample: &Sample = match &args.sample_id {
        Some(id) => dataset
            .samples
            .iter()
            .find(|s| &s.sample_id == id)
            .ok_or_else(|| anyhow::anyhow!("sample {id:?} not in dataset"))?,
        None => &dataset.samples[0],
    };

    let rule = parse_revision(&args.revision, sample)?;
    let initial = shifted_chain(&sample.reference_chain, args.initial_shift, sample.duration_s)?;
    let model = ScriptedChainModel::new(
        render_tagged(&initial)?,
        rule,
        sample.reference_answer.clone(),
    );
    let retriever = DirRetriever::new(&args.frames_dir, args.fps)?;
    if retriever.is_empty() {
        anyhow::bail!("{}: no frames named by index", args.frames_dir.display());
    }
    let cfg = PlannerConfig {
        frames_per_clip: args.frames_per_clip,
        stride_s: args.stride_s,
        clips_per_span: args.clips_per_span,
        max_turns: args.max_turns,
    };
    cfg.validate()?;

    let outcome = observe_infer(sample, &model, &retriever, &cfg, &Default::default())
        .map_err(|abort| anyhow::anyhow!("{abort}"))?;

    let mut buf = serde_json::to_vec_pretty(&outcome)?;
    buf.push(b'\n');
    std::io::Write::write_all(&mut std::io::stdout(), &buf)?;
    if let (Some(before), Some(after)) = (outcome.initial_grounding, outcome.refined_grounding) {
        eprintln!(
            "grounding {before:.4} -> {after:.4} over {} turns, {} frames fetched",
            outcome.trace.len(),
            outcome.trace.iter().map(|t| t.frames.len()).sum::<usize>()
        );
    }
    Ok(ExitCode::SUCCESS)
}

/// Builds the scripted revision rule. "snap" repairs each verified step to
/// the reference anchors in step order, so a distorted initial chain is
/// pulled back onto the reference.
fn parse_revision(spec: &str, sample: &Sample) -> anyhow::Result<RevisionRule> {
    if spec == "identity" {
        return Ok(RevisionRule::Identity);
    }
    if spec == "snap" {
        let targets: Vec<TimeAnchor> = sample
            .reference_chain
            .steps
            .iter()
            .filter_map(|s| s.anchors.first().copied())
            .collect();
        if targets.is_empty() {
            anyhow::bail!("snap revision needs reference anchors");
        }
        return Ok(RevisionRule::SnapTo(targets));
    }
    if let Some(rest) = spec.strip_prefix("shift:") {
        let delta: f64 = rest
            .parse()
            .map_err(|e| anyhow::anyhow!("bad shift amount {rest:?}: {e}"))?;
        return Ok(RevisionRule::Shift(delta));
    }
    anyhow::bail!("unknown revision {spec:?} (want identity, shift:<seconds>, or snap)")
}
