//! The demo operations, as plain Rust. Everything takes and returns strings
//! or byte vectors so the JS side never needs structured marshalling, and
//! errors come back as human-readable messages for direct display.

use cot_core::overlay::{render_timestamp, Frame, OverlayConfig};
use cot_core::parser::{extract_anchors, parse_output, render_anchor};
use cot_core::planner::{plan_for_anchor, PlannerConfig};
use cot_core::reward::{total_reward, AccuracyMode};
use cot_core::sga::{sample_grounding_score, sample_grounding_score_strict};
use cot_core::{RewardConfig, Sample};

/// Score one raw model output against a sample, returning the parse result
/// and the full reward breakdown as JSON. `config_json` may be empty (all
/// defaults) or override any subset of the reward weights. Accuracy uses
/// normalized exact match — there is no judge in the browser.
pub fn score_output(raw_text: &str, sample_json: &str, config_json: &str) -> Result<String, String> {
    let sample: Sample =
        serde_json::from_str(sample_json).map_err(|e| format!("bad sample JSON: {e}"))?;
    sample.validate().map_err(|e| format!("invalid sample: {e}"))?;
    let cfg: RewardConfig = if config_json.trim().is_empty() {
        RewardConfig::default()
    } else {
        serde_json::from_str(config_json).map_err(|e| format!("bad reward config: {e}"))?
    };

    let parsed = parse_output(raw_text, sample.duration_s);
    let breakdown = total_reward(&parsed, &sample, &cfg, AccuracyMode::ExactNormalized, None)
        .map_err(|e| e.to_string())?;
    let reference = &sample.reference_chain;
    let (grounding, grounding_strict) = if reference.all_anchors().is_empty() {
        (None, None)
    } else {
        (
            sample_grounding_score(&parsed.chain, reference, cfg.point_tolerance_s).ok(),
            sample_grounding_score_strict(&parsed.chain, reference).ok(),
        )
    };

    let out = serde_json::json!({
        "format_ok": parsed.format_ok,
        "answer": parsed.chain.answer,
        "steps": parsed.chain.steps,
        "reward": breakdown,
        "grounding": grounding,
        "grounding_strict": grounding_strict,
    });
    serde_json::to_string_pretty(&out).map_err(|e| e.to_string())
}

/// Build the frame-sampling plan for the first time anchor found in
/// `anchor_text` (e.g. "02:15" or "02:10-02:40") and return it as JSON.
pub fn plan_clips(
    anchor_text: &str,
    duration_s: f64,
    frames_per_clip: u32,
    stride_s: f64,
    clips_per_span: u32,
) -> Result<String, String> {
    let cfg = PlannerConfig {
        frames_per_clip: frames_per_clip as usize,
        stride_s,
        clips_per_span: clips_per_span as usize,
        ..PlannerConfig::default()
    };
    cfg.validate().map_err(|e| e.to_string())?;
    let anchors = extract_anchors(anchor_text, duration_s);
    let anchor = anchors
        .first()
        .ok_or_else(|| "no time anchor found; write one like 02:15 or 02:10-02:40".to_string())?;
    let plan = plan_for_anchor(anchor, &cfg, duration_s);

    let out = serde_json::json!({
        "anchor": plan.anchor,
        "label": render_anchor(&plan.anchor).map_err(|e| e.to_string())?,
        "window_s": cfg.window_s(),
        "frame_count": plan.frame_count(),
        "clips": plan.clips,
    });
    serde_json::to_string_pretty(&out).map_err(|e| e.to_string())
}

fn unpack(rgb: u32) -> [u8; 3] {
    [(rgb >> 16) as u8, (rgb >> 8) as u8, rgb as u8]
}

/// Render the `mm:ss` overlay for `t_seconds` onto a solid-color frame and
/// return RGBA bytes ready for a canvas `ImageData`. `scale` 0 picks the
/// automatic size for the frame height. Colors are packed 0xRRGGBB.
#[allow(clippy::too_many_arguments)]
pub fn render_overlay(
    width: u32,
    height: u32,
    t_seconds: f64,
    scale: u32,
    margin_px: u32,
    base_rgb: u32,
    fg_rgb: u32,
    use_box: bool,
    box_rgb: u32,
) -> Result<Vec<u8>, String> {
    if width == 0 || height == 0 || width > 4096 || height > 4096 {
        return Err(format!("frame size {width}x{height} is out of range"));
    }
    let cfg = OverlayConfig {
        scale: if scale == 0 {
            OverlayConfig::auto_scale_for_height(height)
        } else {
            scale
        },
        margin_px,
        foreground: unpack(fg_rgb),
        background_box: use_box.then(|| unpack(box_rgb)),
    };
    let base = Frame::filled(width, height, unpack(base_rgb));
    let out = render_timestamp(&base, t_seconds, &cfg).map_err(|e| e.to_string())?;

    let mut rgba = Vec::with_capacity(out.data.len() / 3 * 4);
    for px in out.data.chunks_exact(3) {
        rgba.extend_from_slice(px);
        rgba.push(255);
    }
    Ok(rgba)
}
