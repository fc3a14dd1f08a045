//! WebAssembly bindings for the browser demo page (`www/index.html`).
//!
//! The operations live in [`ops`] as ordinary Rust functions over strings
//! and byte vectors, so they compile and test on any host; this crate only
//! adds the thin `wasm-bindgen` layer when built for `wasm32`. Build the
//! browser package with `wasm-pack build crates/wasm --target web`.

pub mod ops;

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn err(e: String) -> JsValue {
        JsValue::from_str(&e)
    }

    /// Parse a raw model output and score it against a sample (both JSON
    /// strings); returns the breakdown as a JSON string.
    #[wasm_bindgen]
    pub fn score_output(
        raw_text: &str,
        sample_json: &str,
        config_json: &str,
    ) -> Result<String, JsValue> {
        crate::ops::score_output(raw_text, sample_json, config_json).map_err(err)
    }

    /// Frame-sampling plan for the first anchor in `anchor_text`, as JSON.
    #[wasm_bindgen]
    pub fn plan_clips(
        anchor_text: &str,
        duration_s: f64,
        frames_per_clip: u32,
        stride_s: f64,
        clips_per_span: u32,
    ) -> Result<String, JsValue> {
        crate::ops::plan_clips(anchor_text, duration_s, frames_per_clip, stride_s, clips_per_span)
            .map_err(err)
    }

    /// RGBA bytes of a solid frame with the timestamp label burned in.
    #[wasm_bindgen]
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
    ) -> Result<Vec<u8>, JsValue> {
        crate::ops::render_overlay(
            width, height, t_seconds, scale, margin_px, base_rgb, fg_rgb, use_box, box_rgb,
        )
        .map_err(err)
    }
}
