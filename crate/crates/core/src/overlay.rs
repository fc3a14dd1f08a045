//! Timestamp overlays burned into raw RGB frames.
//!
//! Frames enter and leave as plain RGB24 rasters (with a portable-pixmap
//! reader/writer for fixtures), and the `mm:ss` label is drawn from an
//! embedded 5x7 bitmap font so output is bit-identical across platforms —
//! no system fonts, no anti-aliasing. The label sits in the top-right
//! corner; everything outside its bounding box is left untouched.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::parser::format_timestamp;

/// Raw RGB24 raster, row-major, 3 bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl Frame {
    /// Solid-color frame.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Frame {
        let mut data = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        Frame {
            width,
            height,
            data,
        }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = ((y * self.width + x) * 3) as usize;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }
}

/// Overlay styling. `scale` multiplies the 5x7 glyph cells; the label is
/// right-aligned `margin_px` in from the top-right corner. When
/// `background_box` is set, the label's bounding box is filled with that
/// color before the glyphs are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OverlayConfig {
    pub scale: u32,
    pub margin_px: u32,
    pub foreground: [u8; 3],
    pub background_box: Option<[u8; 3]>,
}

impl Default for OverlayConfig {
    fn default() -> Self {
        OverlayConfig {
            scale: 1,
            margin_px: 4,
            foreground: [255, 255, 255],
            background_box: None,
        }
    }
}

impl OverlayConfig {
    /// Pick a scale so the label height lands near 5% of the frame height
    /// (at least 1). 7 rows per glyph, so scale ≈ 0.05 * h / 7.
    pub fn auto_scale_for_height(frame_height: u32) -> u32 {
        ((0.05 * frame_height as f64 / GLYPH_H as f64).round() as u32).max(1)
    }
}

pub const GLYPH_W: u32 = 5;
pub const GLYPH_H: u32 = 7;

/// The embedded font: 5x7 bitmaps for `0-9` and `:`, one byte per row, low
/// 5 bits used, most significant of those = leftmost pixel. This table is
/// normative — golden tests compose expected rasters directly from it.
const FONT: [(char, [u8; 7]); 11] = [
    ('0', [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E]),
    ('1', [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E]),
    ('2', [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F]),
    ('3', [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E]),
    ('4', [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02]),
    ('5', [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E]),
    ('6', [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E]),
    ('7', [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08]),
    ('8', [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E]),
    ('9', [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C]),
    (':', [0x00, 0x04, 0x04, 0x00, 0x04, 0x04, 0x00]),
];

pub fn glyph(c: char) -> Option<&'static [u8; 7]> {
    FONT.iter().find(|(g, _)| *g == c).map(|(_, rows)| rows)
}

/// Width and height in pixels of a rendered label with `chars` glyphs:
/// glyph cells plus one scale unit of spacing between cells.
pub fn label_size(chars: u32, scale: u32) -> (u32, u32) {
    if chars == 0 {
        return (0, 0);
    }
    (
        chars * GLYPH_W * scale + (chars - 1) * scale,
        GLYPH_H * scale,
    )
}

/// Draw `format_timestamp(t_seconds)` into the top-right corner, returning
/// a new frame. Pixels outside the label's bounding box are bit-identical
/// to the input. Errors if the frame cannot fit the label at the margin.
pub fn render_timestamp(
    frame: &Frame,
    t_seconds: f64,
    cfg: &OverlayConfig,
) -> Result<Frame, Error> {
    if cfg.scale < 1 {
        return Err(Error::InvalidArgument("overlay scale must be >= 1".into()));
    }
    let label = format_timestamp(t_seconds)?;
    let chars: Vec<char> = label.chars().collect();
    let (label_w, label_h) = label_size(chars.len() as u32, cfg.scale);
    let need_w = label_w + cfg.margin_px;
    let need_h = label_h + cfg.margin_px;
    if frame.width < need_w || frame.height < need_h {
        return Err(Error::FrameTooSmall {
            frame_w: frame.width,
            frame_h: frame.height,
            need_w,
            need_h,
            margin: cfg.margin_px,
        });
    }
    let x0 = frame.width - cfg.margin_px - label_w;
    let y0 = cfg.margin_px;

    let mut out = frame.clone();
    if let Some(bg) = cfg.background_box {
        for y in y0..y0 + label_h {
            for x in x0..x0 + label_w {
                out.set(x, y, bg);
            }
        }
    }
    for (idx, &c) in chars.iter().enumerate() {
        let rows = glyph(c).ok_or_else(|| {
            Error::InvalidArgument(format!("no glyph for {c:?} in the overlay font"))
        })?;
        // Cell origin: each glyph advances one cell plus one spacing unit.
        let cell_x = x0 + idx as u32 * (GLYPH_W + 1) * cfg.scale;
        for (row, bits) in rows.iter().enumerate() {
            for col in 0..GLYPH_W {
                if bits & (1 << (GLYPH_W - 1 - col)) != 0 {
                    // Scale each font bit to a scale x scale block.
                    for dy in 0..cfg.scale {
                        for dx in 0..cfg.scale {
                            out.set(
                                cell_x + col * cfg.scale + dx,
                                y0 + row as u32 * cfg.scale + dy,
                                cfg.foreground,
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// One line of the frame-label manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub frame_index: u64,
    pub label: String,
}

/// Labels for every frame of a video sampled at `fps`: one entry per index
/// in `[0, floor(duration_s * fps))` with label `format_timestamp(i / fps)`.
pub fn overlay_manifest(duration_s: f64, fps: f64) -> Result<Vec<ManifestEntry>, Error> {
    if !duration_s.is_finite() || duration_s <= 0.0 {
        return Err(Error::NonPositiveDuration(duration_s));
    }
    if !fps.is_finite() || fps <= 0.0 {
        return Err(Error::InvalidArgument(format!("fps must be > 0, got {fps}")));
    }
    let count = (duration_s * fps).floor() as u64;
    (0..count)
        .map(|i| {
            Ok(ManifestEntry {
                frame_index: i,
                label: format_timestamp(i as f64 / fps)?,
            })
        })
        .collect()
}

/// Encode a frame as a binary portable pixmap (P6, maxval 255).
pub fn write_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.data);
    out
}

pub fn write_ppm_file(frame: &Frame, path: &Path) -> Result<(), Error> {
    std::fs::write(path, write_ppm(frame))?;
    Ok(())
}

/// Decode a binary portable pixmap (P6 only, maxval 255, `#` comments
/// allowed in the header).
pub fn read_ppm(bytes: &[u8]) -> Result<Frame, Error> {
    let bad = |msg: &str| Error::MalformedPixmap(msg.to_string());
    let mut pos = 0usize;

    // Header tokens are separated by whitespace; `#` starts a comment that
    // runs to end of line.
    let mut next_token = |bytes: &[u8]| -> Result<String, Error> {
        let mut tok = String::new();
        while pos < bytes.len() {
            let b = bytes[pos];
            if b == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                if !tok.is_empty() {
                    break;
                }
                pos += 1;
            } else {
                tok.push(b as char);
                pos += 1;
            }
        }
        if tok.is_empty() {
            Err(Error::MalformedPixmap("truncated header".into()))
        } else {
            Ok(tok)
        }
    };

    if next_token(bytes)? != "P6" {
        return Err(bad("not a P6 pixmap"));
    }
    let width: u32 = next_token(bytes)?.parse().map_err(|_| bad("bad width"))?;
    let height: u32 = next_token(bytes)?.parse().map_err(|_| bad("bad height"))?;
    let maxval: u32 = next_token(bytes)?.parse().map_err(|_| bad("bad maxval"))?;
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    // Exactly one whitespace byte separates the header from pixel data.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("missing header terminator"));
    }
    pos += 1;
    let need = width as usize * height as usize * 3;
    let data = &bytes[pos..];
    if data.len() < need {
        return Err(bad("truncated pixel data"));
    }
    Ok(Frame {
        width,
        height,
        data: data[..need].to_vec(),
    })
}

pub fn read_ppm_file(path: &Path) -> Result<Frame, Error> {
    read_ppm(&std::fs::read(path)?)
}
