//! Extraction of reasoning chains from raw model output.
//!
//! Model text is expected to look like
//! `<thinking>Step 1: ... (02:15). Step 2: ...</thinking><answer>...</answer>`
//! but the parser is total: malformed input degrades to a best-effort chain
//! with `format_ok = false`, never an error. The timestamp grammar here is
//! normative — fixtures and the overlay renderer agree on it bit-for-bit.

use std::sync::LazyLock;

use regex::Regex;

use crate::error::Error;
use crate::model::{normalize_anchor, ChainOfTime, ReasoningStep, TimeAnchor};

/// Result of parsing one raw model output.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedOutput {
    pub chain: ChainOfTime,
    /// True iff both tagged sections were present, in order, with non-empty
    /// content. Implies `chain.answer` is non-empty.
    pub format_ok: bool,
    pub raw: String,
}

const THINK_OPEN: &str = "<thinking>";
const THINK_CLOSE: &str = "</thinking>";
const ANSWER_OPEN: &str = "<answer>";
const ANSWER_CLOSE: &str = "</answer>";

/// A timestamp atom: `h:mm:ss` (hours up to 99) or `mm:ss` (minutes up to
/// 999, so in-video times beyond an hour still read naturally). The h:mm:ss
/// arm comes first so `1:02:03` is not half-eaten as `1:02`.
const ATOM: &str = r"(?:\d{1,2}:[0-5]\d:[0-5]\d|\d{1,3}:[0-5]\d)";

static ATOM_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(ATOM).unwrap());

/// Span: two atoms joined by a dash-like separator, `to`, or `~`.
static SPAN_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(r"(?i)({ATOM})\s*(?:-|–|—|to|~)\s*({ATOM})")).unwrap()
});

static STEP_MARKER_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bstep\s+\d+\s*:").unwrap());

/// Parse one raw model output into a chain, flagging whether the required
/// `<thinking>…</thinking><answer>…</answer>` format was followed. Total:
/// any input yields a `ParsedOutput`.
///
/// Salvage rules for malformed input: a missing close tag runs the section
/// to the next section or end of text; when the answer tag is absent
/// entirely, trailing untagged text after `</thinking>` is used as the
/// answer (with `format_ok` still false). First occurrence of each tag wins.
pub fn parse_output(raw_text: &str, duration_s: f64) -> ParsedOutput {
    let raw = raw_text;
    let t_open = raw.find(THINK_OPEN);
    let t_close = {
        let from = t_open.map(|i| i + THINK_OPEN.len()).unwrap_or(0);
        raw[from..].find(THINK_CLOSE).map(|i| i + from)
    };
    let a_open = raw.find(ANSWER_OPEN);
    let a_close = {
        let from = a_open.map(|i| i + ANSWER_OPEN.len()).unwrap_or(0);
        raw[from..].find(ANSWER_CLOSE).map(|i| i + from)
    };

    let thinking = match (t_open, t_close) {
        (Some(o), Some(c)) => &raw[o + THINK_OPEN.len()..c],
        // Unclosed thinking: run to the answer tag or the end.
        (Some(o), None) => {
            let end = a_open.filter(|&a| a > o).unwrap_or(raw.len());
            &raw[o + THINK_OPEN.len()..end]
        }
        // Close tag without an open: everything before it was the thinking.
        (None, Some(c)) => &raw[..c],
        // No tags: treat the pre-answer text as thinking so anchors and
        // steps are still salvaged.
        (None, None) => &raw[..a_open.unwrap_or(raw.len())],
    };

    let after_thinking = t_close.map(|c| c + THINK_CLOSE.len());
    let answer = match (a_open, a_close) {
        (Some(o), Some(c)) => &raw[o + ANSWER_OPEN.len()..c],
        (Some(o), None) => &raw[o + ANSWER_OPEN.len()..],
        // No answer tag: salvage trailing untagged text after </thinking>,
        // stopping at a stray close tag if one exists.
        (None, c) => match after_thinking {
            Some(from) => &raw[from..c.unwrap_or(raw.len()).max(from)],
            None => "",
        },
    };
    let answer = answer.trim();

    let format_ok = match (t_open, t_close, a_open, a_close) {
        (Some(to), Some(tc), Some(ao), Some(ac)) => {
            to < tc
                && tc + THINK_CLOSE.len() <= ao
                && ao < ac
                && !thinking.trim().is_empty()
                && !answer.is_empty()
        }
        _ => false,
    };

    let steps = segment_steps(thinking)
        .into_iter()
        .map(|text| {
            let anchors = extract_anchors(&text, duration_s);
            ReasoningStep { text, anchors }
        })
        .collect();

    ParsedOutput {
        chain: ChainOfTime {
            steps,
            answer: answer.to_string(),
        },
        format_ok,
        raw: raw.to_string(),
    }
}

/// Split thinking text into step strings. Precedence:
///
/// 1. explicit `Step <k>:` markers (case-insensitive), when at least two exist;
/// 2. newline boundaries, when they yield at least two non-empty lines;
/// 3. sentence terminators (`.` `!` `?`) followed by whitespace — which
///    automatically protects `mm:ss` colons and decimals like `3.5`.
///
/// Segments are trimmed; empty ones are dropped. Text before the first step
/// marker is kept as its own segment rather than discarded.
pub fn segment_steps(thinking_text: &str) -> Vec<String> {
    let starts: Vec<usize> = STEP_MARKER_RE
        .find_iter(thinking_text)
        .map(|m| m.start())
        .collect();
    if starts.len() >= 2 {
        let mut out = Vec::new();
        let mut bounds = Vec::with_capacity(starts.len() + 2);
        if starts[0] > 0 {
            bounds.push(0);
        }
        bounds.extend_from_slice(&starts);
        bounds.push(thinking_text.len());
        for w in bounds.windows(2) {
            let seg = thinking_text[w[0]..w[1]].trim();
            if !seg.is_empty() {
                out.push(seg.to_string());
            }
        }
        return out;
    }

    let lines: Vec<&str> = thinking_text
        .split('\n')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if lines.len() >= 2 {
        return lines.into_iter().map(str::to_string).collect();
    }

    split_sentences(thinking_text)
}

/// Sentence split: break after `.`/`!`/`?` when the next character is
/// whitespace. A terminator at end-of-text closes the last sentence without
/// needing trailing whitespace.
fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let next_is_ws = matches!(chars.peek(), Some((_, n)) if n.is_whitespace());
            if next_is_ws {
                let seg = text[start..i + c.len_utf8()].trim();
                if !seg.is_empty() {
                    out.push(seg.to_string());
                }
                start = i + c.len_utf8();
            }
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
    out
}

/// Extract every explicit time anchor from a step's text, in text order.
///
/// Spans are matched before points so a span's endpoints are not re-emitted
/// as separate anchors. Matches hugged by extra digits or stray colons are
/// rejected (`12:345`, `123:45:10`) because their reading is ambiguous.
/// Results are normalized (clamped into `[0, duration_s]`, reversed spans
/// swapped, zero-width spans collapsed to points).
pub fn extract_anchors(step_text: &str, duration_s: f64) -> Vec<TimeAnchor> {
    // The parser is total even when callers hand it a junk duration: fall
    // back to "no clamping" rather than refusing to parse.
    let duration = if duration_s.is_finite() && duration_s > 0.0 {
        duration_s
    } else {
        f64::MAX
    };

    let bytes = step_text.as_bytes();
    let boundary_ok = |start: usize, end: usize| -> bool {
        if start > 0 {
            let prev = bytes[start - 1];
            if prev.is_ascii_digit() || prev == b':' {
                return false;
            }
        }
        if end < bytes.len() {
            let next = bytes[end];
            if next.is_ascii_digit() {
                return false;
            }
            // `02:15:7`-style continuations are ambiguous; drop them.
            if next == b':' && end + 1 < bytes.len() && bytes[end + 1].is_ascii_digit() {
                return false;
            }
        }
        true
    };

    let mut found: Vec<(usize, TimeAnchor)> = Vec::new();
    let mut consumed: Vec<(usize, usize)> = Vec::new();

    for caps in SPAN_RE.captures_iter(step_text) {
        let whole = caps.get(0).unwrap();
        if !boundary_ok(whole.start(), whole.end()) {
            continue;
        }
        let a = atom_to_seconds(caps.get(1).unwrap().as_str());
        let b = atom_to_seconds(caps.get(2).unwrap().as_str());
        if let Ok(anchor) = normalize_anchor(a, Some(b), duration) {
            found.push((whole.start(), anchor));
            consumed.push((whole.start(), whole.end()));
        }
    }

    for m in ATOM_RE.find_iter(step_text) {
        let overlaps_span = consumed
            .iter()
            .any(|&(s, e)| m.start() < e && m.end() > s);
        if overlaps_span || !boundary_ok(m.start(), m.end()) {
            continue;
        }
        let secs = atom_to_seconds(m.as_str());
        if let Ok(anchor) = normalize_anchor(secs, None, duration) {
            found.push((m.start(), anchor));
        }
    }

    found.sort_by_key(|&(pos, _)| pos);
    found.into_iter().map(|(_, a)| a).collect()
}

/// Convert a matched atom (`mm:ss` or `h:mm:ss`) to seconds. Only called on
/// strings the atom regex accepted.
fn atom_to_seconds(atom: &str) -> f64 {
    let parts: Vec<u64> = atom.split(':').map(|p| p.parse().unwrap()).collect();
    match parts[..] {
        [m, s] => (m * 60 + s) as f64,
        [h, m, s] => (h * 3600 + m * 60 + s) as f64,
        _ => unreachable!("atom regex admits 2 or 3 fields"),
    }
}

/// Render seconds as zero-padded `mm:ss`, letting the minutes field exceed
/// 59 rather than rolling to hours (3723 → "62:03"). Rounds to the nearest
/// whole second, ties to even.
pub fn format_timestamp(seconds: f64) -> Result<String, Error> {
    if !seconds.is_finite() {
        return Err(Error::NonFinite {
            what: "timestamp",
            value: seconds,
        });
    }
    if seconds < 0.0 {
        return Err(Error::NegativeTimestamp(seconds));
    }
    let total = seconds.round_ties_even() as u64;
    Ok(format!("{:02}:{:02}", total / 60, total % 60))
}

/// Parse an explicit `mm:ss` or `h:mm:ss` string (as handed to a CLI flag)
/// back to seconds. Minutes may be any width, so everything
/// `format_timestamp` produces parses back exactly.
pub fn parse_timestamp(text: &str) -> Result<f64, Error> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let to_u64 = |p: &str| -> Option<u64> {
        if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        p.parse().ok()
    };
    let bad = || Error::BadTimestamp(text.to_string());
    let secs = match parts[..] {
        [m, s] => {
            let (m, s) = (to_u64(m).ok_or_else(bad)?, to_u64(s).ok_or_else(bad)?);
            if s >= 60 {
                return Err(bad());
            }
            (m * 60 + s) as f64
        }
        [h, m, s] => {
            let (h, m, s) = (
                to_u64(h).ok_or_else(bad)?,
                to_u64(m).ok_or_else(bad)?,
                to_u64(s).ok_or_else(bad)?,
            );
            if m >= 60 || s >= 60 {
                return Err(bad());
            }
            (h * 3600 + m * 60 + s) as f64
        }
        _ => return Err(bad()),
    };
    Ok(secs)
}

/// Render an anchor in the same grammar the extractor reads: `mm:ss` for
/// points, `mm:ss-mm:ss` for spans.
pub fn render_anchor(anchor: &TimeAnchor) -> Result<String, Error> {
    match anchor {
        TimeAnchor::Point(p) => format_timestamp(*p),
        TimeAnchor::Span { start_s, end_s } => Ok(format!(
            "{}-{}",
            format_timestamp(*start_s)?,
            format_timestamp(*end_s)?
        )),
    }
}

/// Render a chain back into tagged model-output form:
///
/// `<thinking>Step 1: text (02:15). Step 2: ...</thinking><answer>...</answer>`
///
/// For chains whose anchors sit on whole seconds and whose step texts avoid
/// sentence terminators and timestamp-shaped digit runs, parsing the result
/// recovers the same step count, the same per-step anchors, and the same
/// answer (step text gains the marker prefix and the rendered anchor).
/// Useful for building reference-identical predictions and demo payloads.
pub fn render_tagged(chain: &ChainOfTime) -> Result<String, Error> {
    let mut thinking = String::new();
    for (i, step) in chain.steps.iter().enumerate() {
        if i > 0 {
            thinking.push(' ');
        }
        thinking.push_str(&format!("Step {}: {}", i + 1, step.text));
        if !step.anchors.is_empty() {
            let rendered: Result<Vec<_>, _> = step.anchors.iter().map(render_anchor).collect();
            thinking.push_str(&format!(" ({})", rendered?.join(", ")));
        }
        thinking.push('.');
    }
    Ok(format!(
        "{THINK_OPEN}{thinking}{THINK_CLOSE}{ANSWER_OPEN}{}{ANSWER_CLOSE}",
        chain.answer
    ))
}
