//! Output backends for interpreted pages.
//!
//! JSON is the canonical machine interface; SVG is for looking at.

use thiserror::Error;

use crate::layout::Rgba;

pub mod json;
pub mod svg;

pub use json::{emit_json, PageDocument, SCHEMA_VERSION};
pub use svg::emit_svg;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("font {k} has no outlines; use text mode or a native font")]
    OutlineUnavailable { k: i32 },
    #[error("invalid render options: {0}")]
    InvalidOptions(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Target {
    #[default]
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SvgGlyphMode {
    #[default]
    Paths,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub target: Target,
    pub svg_glyph_mode: SvgGlyphMode,
    pub background: Option<Rgba>,
    /// Output units per big point.
    pub scale: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            target: Target::Json,
            svg_glyph_mode: SvgGlyphMode::Paths,
            background: None,
            scale: 1.0,
        }
    }
}

impl RenderOptions {
    pub fn validate(&self) -> Result<(), RenderError> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(RenderError::InvalidOptions(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }
}

/// Formats `v` with at most four decimals, rounding half to even on the
/// exact binary value, without trailing zeros and without negative zero.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return "0".into();
    }
    let mut s = format!("{v:.4}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}
