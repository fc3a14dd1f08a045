//! Criterion 8: golden overlay rasters. Expected images are composed here
//! from a re-typed copy of the 5x7 font, writing straight into a raw byte
//! buffer — none of the renderer's cell arithmetic is reused — and the
//! renderer must match them bit for bit. A second pass checks on random
//! frames that nothing outside the label's bounding box is ever touched.

use cot_core::overlay::{render_timestamp, Frame, OverlayConfig};
use cot_core::parser::format_timestamp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::support;

/// Independent transcription of the overlay font (row bytes, low five bits,
/// MSB of those five = leftmost column).
fn font_rows(c: char) -> [u8; 7] {
    match c {
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        ':' => [0x00, 0x04, 0x04, 0x00, 0x04, 0x04, 0x00],
        other => panic!("no font row for {other:?}"),
    }
}

fn put(data: &mut [u8], width: u32, x: u32, y: u32, rgb: [u8; 3]) {
    let i = ((y * width + x) * 3) as usize;
    data[i..i + 3].copy_from_slice(&rgb);
}

/// Oracle composition: paint `label` right-aligned at `margin` from the
/// top-right corner into a copy of `base`, one font bit at a time.
fn compose_oracle(base: &Frame, label: &str, cfg: &OverlayConfig) -> Frame {
    let n = label.chars().count() as u32;
    // A cell is 5 columns wide plus 1 spacing column, minus the trailing
    // spacing: (6n - 1) columns, each `scale` pixels.
    let label_w = (6 * n - 1) * cfg.scale;
    let label_h = 7 * cfg.scale;
    let x0 = base.width - cfg.margin_px - label_w;
    let y0 = cfg.margin_px;

    let mut data = base.data.clone();
    if let Some(bg) = cfg.background_box {
        for y in y0..y0 + label_h {
            for x in x0..x0 + label_w {
                put(&mut data, base.width, x, y, bg);
            }
        }
    }
    for (idx, c) in label.chars().enumerate() {
        let rows = font_rows(c);
        let glyph_x = x0 + idx as u32 * 6 * cfg.scale;
        for (row, bits) in rows.iter().enumerate() {
            for col in 0..5u32 {
                if bits & (0x10 >> col) == 0 {
                    continue;
                }
                for dy in 0..cfg.scale {
                    for dx in 0..cfg.scale {
                        put(
                            &mut data,
                            base.width,
                            glyph_x + col * cfg.scale + dx,
                            y0 + row as u32 * cfg.scale + dy,
                            cfg.foreground,
                        );
                    }
                }
            }
        }
    }
    Frame {
        width: base.width,
        height: base.height,
        data,
    }
}

struct Golden {
    t_seconds: f64,
    label: &'static str,
    scale: u32,
    base_rgb: [u8; 3],
    frame_w: u32,
    frame_h: u32,
    margin_px: u32,
    foreground: [u8; 3],
    background_box: Option<[u8; 3]>,
}

const GOLDENS: &[Golden] = &[
    Golden {
        t_seconds: 0.0,
        label: "00:00",
        scale: 1,
        base_rgb: [0, 0, 0],
        frame_w: 64,
        frame_h: 32,
        margin_px: 4,
        foreground: [255, 255, 255],
        background_box: None,
    },
    Golden {
        t_seconds: 0.0,
        label: "00:00",
        scale: 2,
        base_rgb: [30, 90, 30],
        frame_w: 128,
        frame_h: 64,
        margin_px: 6,
        foreground: [255, 255, 0],
        background_box: Some([0, 0, 0]),
    },
    Golden {
        t_seconds: 135.0,
        label: "02:15",
        scale: 1,
        base_rgb: [12, 34, 56],
        frame_w: 96,
        frame_h: 48,
        margin_px: 2,
        foreground: [200, 200, 200],
        background_box: Some([40, 40, 40]),
    },
    Golden {
        t_seconds: 135.0,
        label: "02:15",
        scale: 2,
        base_rgb: [255, 255, 255],
        frame_w: 160,
        frame_h: 90,
        margin_px: 4,
        foreground: [0, 0, 0],
        background_box: None,
    },
    Golden {
        t_seconds: 3723.0,
        label: "62:03",
        scale: 1,
        base_rgb: [80, 0, 80],
        frame_w: 64,
        frame_h: 32,
        margin_px: 0,
        foreground: [255, 128, 0],
        background_box: None,
    },
    Golden {
        t_seconds: 3723.0,
        label: "62:03",
        scale: 2,
        base_rgb: [0, 0, 64],
        frame_w: 160,
        frame_h: 90,
        margin_px: 4,
        foreground: [255, 255, 255],
        background_box: Some([16, 16, 16]),
    },
];

#[test]
fn criterion_08_overlay_golden() {
    for g in GOLDENS {
        assert_eq!(
            format_timestamp(g.t_seconds).unwrap(),
            g.label,
            "label mismatch for t={}",
            g.t_seconds
        );
        let cfg = OverlayConfig {
            scale: g.scale,
            margin_px: g.margin_px,
            foreground: g.foreground,
            background_box: g.background_box,
        };
        let base = Frame::filled(g.frame_w, g.frame_h, g.base_rgb);
        let got = render_timestamp(&base, g.t_seconds, &cfg).unwrap();
        let want = compose_oracle(&base, g.label, &cfg);
        assert_eq!(
            got, want,
            "raster mismatch for {} at scale {}",
            g.label, g.scale
        );
        assert_ne!(got, base, "label must change at least one pixel");
    }

    // Random frames: everything outside the label's bounding box must be
    // byte-identical to the input.
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for round in 0..100 {
        let width = rng.random_range(100..=200u32);
        let height = rng.random_range(50..=120u32);
        let mut data = vec![0u8; (width * height * 3) as usize];
        rng.fill(&mut data[..]);
        let base = Frame {
            width,
            height,
            data,
        };
        let cfg = OverlayConfig {
            scale: rng.random_range(1..=3),
            margin_px: rng.random_range(0..=6),
            foreground: [rng.random(), rng.random(), rng.random()],
            background_box: if rng.random_bool(0.5) {
                Some([rng.random(), rng.random(), rng.random()])
            } else {
                None
            },
        };
        let t = f64::from(rng.random_range(0..6000u32));
        let got = render_timestamp(&base, t, &cfg).unwrap();

        let label_w = (6 * 5 - 1) * cfg.scale;
        let label_h = 7 * cfg.scale;
        let x0 = width - cfg.margin_px - label_w;
        let y0 = cfg.margin_px;
        for y in 0..height {
            for x in 0..width {
                let inside = x >= x0 && x < x0 + label_w && y >= y0 && y < y0 + label_h;
                if !inside {
                    assert_eq!(
                        got.get(x, y),
                        base.get(x, y),
                        "round {round}: pixel ({x},{y}) outside the label box changed"
                    );
                }
            }
        }
    }

    support::pass(
        8,
        &format!(
            "{} golden rasters bit-identical at scales 1 and 2; 100 random frames untouched \
             outside the label box",
            GOLDENS.len()
        ),
    );
}
